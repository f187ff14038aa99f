use kinsy::motion::{rat, TimeInstant};
use kinsy::scenario::{generate, parse_scenario, GenSpec};
use proptest::prelude::*;

#[test]
fn documented_example_parses() {
    let text =
        "# comment\ndim 2\ndegree 1\ntheta pi/3\nhorizon 1\nseed 7\npoint 0 | 0 1 | 1/2\npoint 1 | 1 | -1/4 3/8\n";
    let sc = parse_scenario(text).unwrap();
    assert_eq!(sc.header.dim, 2);
    assert_eq!(sc.header.seed, Some(7));
    assert!((sc.header.theta.unwrap() - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
    let p1 = &sc.points[1];
    assert_eq!(p1.point_id, 1);
    assert_eq!(p1.position(&rat(2, 1)), vec![rat(1, 1), rat(1, 2)]);
}

#[test]
fn errors_carry_positions() {
    let cases = [
        ("degree 1\npoint 0 | 0 | 0\n", 2),
        ("dim 2\ndegree 1\npoint 0 | 0 | 0 x\n", 3),
        ("dim 2\ndegree 1\npoint 0 | 0 | 0\npoint 0 | 1 | 1\n", 4),
        ("dim 2\ndegree 1\npoint 0 | 0\n", 3),
        ("dim 5\n", 1),
        ("dim 2\ndegree 1\nhorizon -1\n", 3),
    ];
    for (text, line) in cases {
        let e = parse_scenario(text).unwrap_err();
        assert_eq!(e.line, line, "{:?}: {}", text, e);
        assert!(e.column >= 1);
    }
}

#[test]
fn empty_point_set_is_valid() {
    let sc = parse_scenario("dim 3\ndegree 2\n").unwrap();
    assert!(sc.points.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn generated_scenarios_round_trip(n in 0usize..40, dim in 2usize..=3, degree in 0usize..=4, seed in any::<u64>()) {
        let sc = generate(&GenSpec { n, dim, degree, seed, horizon: rat(3, 2), theta: Some(0.5), eps: Some(0.25) });
        let text = sc.to_string();
        let back = parse_scenario(&text).unwrap();
        prop_assert_eq!(&back, &sc);
        prop_assert_eq!(back.to_string(), text);
        // Starting positions lie in the unit box.
        for p in &sc.points {
            for x in p.position_f64(&TimeInstant::zero()) {
                prop_assert!((0.0..=1.0).contains(&x));
            }
        }
    }
}
