use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use holderforms::chains::*;
use holderforms::dynamics::*;
use holderforms::fields::*;
use holderforms::inequality::*;
use holderforms::mollify::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn alpha(p: Point) -> [f64; 2] {
    let [x, y] = p;
    [x * (TAU * y).sin(), y * y * x.cos()]
}

fn d_alpha(p: Point) -> f64 {
    let [x, y] = p;
    -y * y * x.sin() - TAU * x * (TAU * y).cos()
}

fn small_w() -> &'static (OneForm, f64) {
    static W: OnceLock<(OneForm, f64)> = OnceLock::new();
    W.get_or_init(|| {
        let w = make_weierstrass_2d(0.5, 2, 7, 513, 17).unwrap();
        let a = OneForm::new(w.scaled(0.0), w, 0.5).unwrap();
        let c = a.cnorm().unwrap().cnorm;
        (a, c)
    })
}

fn pt() -> impl Strategy<Value = Point> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y)| [x, y])
}

fn disk() -> impl Strategy<Value = ParamDisk> {
    prop_oneof![
        (pt(), 0.05..1.0f64, 0.05..1.0f64).prop_map(|(c, w, h)| ParamDisk::Rectangle {
            corner: c,
            width: w,
            height: h
        }),
        (pt(), 0.05..1.0f64).prop_map(|(c, r)| ParamDisk::Polar { center: c, radius: r }),
        (any::<u64>(), 3usize..10)
            .prop_map(|(s, n)| random_convex_polygon(&mut ChaCha8Rng::seed_from_u64(s), n).unwrap()),
    ]
}

fn chain() -> impl Strategy<Value = ParamCurve> {
    prop::collection::vec(pt(), 2..6).prop_map(|v| {
        let segs: Vec<Segment> = v.windows(2).map(|w| Segment::Line { from: w[0], to: w[1] }).collect();
        ParamCurve::from_segments(segs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reversal_negates(c in chain()) {
        let f = AnalyticOneForm(alpha);
        let a = integrate_one_form(&f, &c).unwrap();
        let b = integrate_one_form(&f, &c.reversed()).unwrap();
        prop_assert!((a + b).abs() <= 1e-14 * (1.0 + a.abs()));
    }

    #[test]
    fn concatenation_adds(c in chain(), d in chain()) {
        let f = AnalyticOneForm(alpha);
        let bridge = ParamCurve::segment(c.end(), d.start());
        let joined = c.concat(&bridge).unwrap().concat(&d).unwrap();
        let parts: f64 = [&c, &bridge, &d].iter().map(|x| integrate_one_form(&f, x).unwrap()).sum();
        let whole = integrate_one_form(&f, &joined).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * (1.0 + parts.abs()));
    }

    #[test]
    fn reparametrization_invariant(c in chain(), a in -0.9..0.9f64) {
        let f = AnalyticOneForm(alpha);
        let x = integrate_one_form(&f, &c).unwrap();
        let y = integrate_one_form(&f, &c.warped(a).unwrap()).unwrap();
        prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()), "{} vs {}", x, y);
    }

    #[test]
    fn affine_image_preserves_pullback(c in chain(), m in prop::array::uniform4(-2.0..2.0f64)) {
        // ∫_{Lγ} dx equals ∫_γ L*dx = a dx + b dy
        let map = Affine::linear([[m[0], m[1]], [m[2], m[3]]]);
        let lhs = integrate_one_form(&AnalyticOneForm(|_| [1.0, 0.0]), &c.transformed(&map)).unwrap();
        let rhs = integrate_one_form(&AnalyticOneForm(|_| [m[0], m[1]]), &c).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn stokes_on_disks(d in disk()) {
        let b = integrate_one_form(&AnalyticOneForm(alpha), &d.boundary()).unwrap();
        let i = integrate_two_form(&AnalyticTwoForm(d_alpha), &d).unwrap();
        let area = disk_area(&d).unwrap();
        prop_assert!((b - i).abs() <= 1e-5 * (1.0 + area), "{} vs {}", b, i);
    }

    #[test]
    fn isoperimetric_holds(d in disk()) {
        prop_assert!(isoperimetric_check(&d).unwrap().holds);
    }

    #[test]
    fn kernel_mass_is_one(eps in 0.001..0.2f64, n in 65usize..600, two in any::<bool>()) {
        let ax = Axis::periodic(0.0, 1.0, n).unwrap();
        let axes = if two { vec![ax, ax] } else { vec![ax] };
        prop_assert_eq!(DiscreteKernel::for_grid(&axes, eps).mass(), 1.0);
    }

    #[test]
    fn mollified_sup_bound(seed in any::<u64>(), eps in 0.005..0.3f64) {
        let u = random_field(&mut ChaCha8Rng::seed_from_u64(seed), vec![Axis::periodic(0.0, 1.0, 257).unwrap()]).unwrap();
        let (lo, hi) = u.min_max();
        let (a, b) = mollify(&u, eps).unwrap().min_max();
        prop_assert!(a >= lo && b <= hi);
    }

    #[test]
    fn sweep_never_beats_closed_form(
        area in 1e-4..1.0f64, length in 0.05..4.0f64, theta in 0.05..0.95f64, cnorm in 0.1..50.0f64,
        lo in -6.0..-1.0f64, span in 0.5..5.0f64,
    ) {
        let grid = log_grid(10f64.powf(lo), 10f64.powf(lo + span), 200).unwrap();
        let s = eps_sweep(cnorm, area, length, theta, &grid).unwrap();
        prop_assert!(s.min_value() >= s.closed_form_min * (1.0 - 1e-12));
        let at = eps_sweep(cnorm, area, length, theta, &[eps_star(area, length, theta).unwrap()]).unwrap();
        prop_assert!((at.min_value() - at.closed_form_min).abs() <= 1e-12 * at.closed_form_min);
    }

    #[test]
    fn rates_dual_under_inversion(seed in any::<u64>(), factors in 1usize..6) {
        let cat = ToralAutomorphism::from_row_major(&[2, 1, 1, 1]).unwrap();
        let p = random_sl2z(&mut ChaCha8Rng::seed_from_u64(seed), factors, 3).unwrap();
        let a = cat.conjugate(&p).unwrap();
        let r = spectral_rates(&a, 0).unwrap().inverse();
        let s = spectral_rates(&a.inverse().unwrap(), 0).unwrap();
        for (x, y) in [(r.lambda_u, s.lambda_u), (r.lambda_s, s.lambda_s), (r.m_u, s.m_u), (r.m_s, s.m_s)] {
            let (x, y) = (x.unwrap(), y.unwrap());
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn criteria_decrease_in_theta(mu in 1.01..10.0f64, nu in 0.01..0.99f64, mc in 0.5..2.0f64, t in 0.01..0.98f64, dt in 0.001..0.02f64, ell in 1usize..3) {
        let t2 = (t + dt).min(0.999);
        prop_assert!(anosov_value(mu, nu, t2).unwrap().value < anosov_value(mu, nu, t).unwrap().value);
        let a = accessibility_value(mu, nu, mc, t, ell).unwrap();
        let b = accessibility_value(mu, nu, mc, t2, ell).unwrap();
        prop_assert!(b.value < a.value);
        // the sign of value − 1 flips exactly at the threshold
        prop_assert_eq!(a.holds, t > a.theta_threshold);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn inequality_homogeneous(c in prop_oneof![-20.0..-0.1f64, 0.1..20.0f64], x in 0.0..0.9f64, y in 0.0..0.9f64, j in 3i32..7) {
        let (a, cn) = small_w();
        let fam = vec![ParamDisk::square([x, y], 2f64.powi(-j))];
        let r1 = verify_with_cnorm(a, &fam, 0.5, 1.5, *cn).unwrap();
        let r2 = verify_with_cnorm(&a.scaled(c), &fam, 0.5, 1.5, c.abs() * cn).unwrap();
        let (p, q) = (&r1.reports[0], &r2.reports[0]);
        prop_assert!(!p.skipped && !q.skipped);
        prop_assert!((q.lhs - c.abs() * p.lhs).abs() <= 1e-10 * (c.abs() * p.lhs).max(1e-300));
        prop_assert!((q.ratio - p.ratio).abs() <= 1e-10 * p.ratio.max(1e-300));
    }
}

#[test]
fn circle_integral_of_x_dy() {
    let v = integrate_one_form(
        &AnalyticOneForm(|p: Point| [0.0, p[0]]),
        &ParamCurve::circle([0.3, -0.2], 2.0),
    )
    .unwrap();
    assert!((v - 4.0 * PI).abs() < 1e-12);
}
