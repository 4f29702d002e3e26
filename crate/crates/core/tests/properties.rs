use mixmono::{
    bound_box, build_decomposition, build_embedding, integrate_embedding, jacobian_bounds, jordan_split,
    refine_bounds, sample_flow, sample_trajectory, BoundOptions, BoxDomain, EmbeddingSystem, ScalarFunction,
    TvOptions, VectorField,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Mat = [[f64; 4]; 4];

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// `exp(A t)` by Taylor series with scaling and squaring.
fn expm(a: &Mat, t: f64) -> Mat {
    let squarings = 10;
    let s = t / f64::from(1u32 << squarings);
    let mut term = [[0.0; 4]; 4];
    let mut sum = [[0.0; 4]; 4];
    for i in 0..4 {
        term[i][i] = 1.0;
        sum[i][i] = 1.0;
    }
    for k in 1..30 {
        term = matmul(&term, a);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v *= s / k as f64;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

fn embedding(n: usize, comps: &[&str], lo: &[f64], hi: &[f64]) -> (VectorField, EmbeddingSystem) {
    let f = VectorField::parse(n, comps).unwrap();
    let b = BoxDomain::from_corners(lo, hi).unwrap();
    let spec = build_decomposition(&jacobian_bounds(&f, &b, 1e-9).unwrap(), 0.0).unwrap();
    let sys = build_embedding(&f, &spec).unwrap();
    (f, sys)
}

#[test]
fn metzler_tube_matches_matrix_exponential() {
    let (f, sys) = embedding(2, &["-x1 + x2", "x1 - x2"], &[-1.0, -1.0], &[1.0, 1.0]);
    // State (x1, x2, y1, y2): g1 = -y1 + x2, g2 = x1 - y2, mirrored for y.
    let a: Mat = [[0.0, 1.0, -1.0, 0.0], [1.0, 0.0, 0.0, -1.0], [-1.0, 0.0, 0.0, 1.0], [0.0, -1.0, 1.0, 0.0]];
    let (lo, hi) = ([-0.5, 0.0], [0.5, 1.0]);
    let tube = integrate_embedding(&sys, &lo, &hi, 1.0, 1e-3).unwrap();
    let s0 = [lo[0], lo[1], hi[0], hi[1]];
    for sample in tube.samples.iter().step_by(100) {
        let e = expm(&a, sample.t);
        let want: Vec<f64> = (0..4).map(|i| (0..4).map(|j| e[i][j] * s0[j]).sum()).collect();
        let got = [sample.lower.clone(), sample.upper.clone()].concat();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9, "t = {}: {got:?} vs {want:?}", sample.t);
        }
    }

    // exp(A t) x0 for the linear system itself stays inside the tube.
    let lin: [[f64; 2]; 2] = [[-1.0, 1.0], [1.0, -1.0]];
    let mut big = [[0.0; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            big[i][j] = lin[i][j];
        }
    }
    let end = tube.last();
    let e = expm(&big, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let x0 = [rng.gen_range(lo[0]..=hi[0]), rng.gen_range(lo[1]..=hi[1])];
        let x: Vec<f64> = (0..2).map(|i| e[i][0] * x0[0] + e[i][1] * x0[1]).collect();
        let sampled = sample_flow(&f, &x0, 1.0, 1e-3).unwrap();
        for k in 0..2 {
            assert!((x[k] - sampled[k]).abs() < 1e-9);
            assert!(end.lower[k] - 1e-9 <= x[k] && x[k] <= end.upper[k] + 1e-9);
        }
    }
}

#[test]
fn diagonal_runs_follow_the_flow() {
    let (f, sys) = embedding(2, &["x2", "-sin(x1) - 0.2*x2"], &[-1.0, -1.0], &[1.0, 1.0]);
    let x0 = [0.4, -0.3];
    let tube = integrate_embedding(&sys, &x0, &x0, 2.0, 1e-3).unwrap();
    let path = sample_trajectory(&f, &x0, 2.0, 1e-3).unwrap();
    for ((_, x), s) in path.iter().zip(&tube.samples) {
        for k in 0..2 {
            assert!((s.lower[k] - s.upper[k]).abs() < 1e-6);
            assert!((s.lower[k] - x[k]).abs() < 1e-6);
        }
    }
}

#[test]
fn nonlinear_tube_encloses_trajectories() {
    let lo = [-0.3, -0.3];
    let hi = [0.3, 0.3];
    let (f, sys) = embedding(2, &["x2", "-sin(x1) - 0.2*x2"], &[-3.0, -3.0], &[3.0, 3.0]);
    let tube = integrate_embedding(&sys, &lo, &hi, 1.0, 1e-3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for s in &tube.samples {
        for k in 0..2 {
            assert!(s.lower[k] <= s.upper[k] + 1e-9);
        }
    }
    for _ in 0..100 {
        let x0 = [rng.gen_range(lo[0]..=hi[0]), rng.gen_range(lo[1]..=hi[1])];
        for ((_, x), s) in sample_trajectory(&f, &x0, 1.0, 1e-3).unwrap().iter().zip(&tube.samples) {
            for k in 0..2 {
                assert!(s.lower[k] - 1e-6 <= x[k] && x[k] <= s.upper[k] + 1e-6);
            }
        }
    }
}

#[test]
fn larger_initial_box_gives_larger_tube() {
    let (_, sys) = embedding(2, &["x2", "-sin(x1) - 0.2*x2"], &[-3.0, -3.0], &[3.0, 3.0]);
    let small = integrate_embedding(&sys, &[-0.1, 0.0], &[0.2, 0.1], 1.5, 1e-2).unwrap();
    let large = integrate_embedding(&sys, &[-0.3, -0.1], &[0.2, 0.4], 1.5, 1e-2).unwrap();
    for (s, l) in small.samples.iter().zip(&large.samples) {
        assert_eq!(s.t, l.t);
        for k in 0..2 {
            assert!(l.lower[k] <= s.lower[k] + 1e-12 && s.upper[k] <= l.upper[k] + 1e-12, "t = {}", s.t);
        }
    }
}

#[test]
fn decay_embedding_expressions() {
    let (_, sys) = embedding(1, &["-x1"], &[0.0], &[1.0]);
    let e = sys.expressions();
    let printed: Vec<String> = e.components().iter().map(|c| c.to_string()).collect();
    assert_eq!(printed, vec!["-x2", "-x1"]);
    let (_, sys) = embedding(2, &["-x1 + x2", "x1 - x2"], &[-1.0, -1.0], &[1.0, 1.0]);
    let printed: Vec<String> = sys.expressions().components().iter().map(|c| c.to_string()).collect();
    assert_eq!(printed, vec!["-x3 + x2", "x1 - x4", "-x1 + x4", "x3 - x2"]);
}

#[test]
fn width_of_variation_bound() {
    let opts = TvOptions::default();
    for (text, a, b) in [("-x1", 0.0, 1.0), ("x1^2", -1.0, 1.0), ("x1*sin(x1)", -10.0, 10.0), ("abs(x1 - 0.3)", 0.0, 2.0)] {
        let f = ScalarFunction::on(text, a, b).unwrap();
        let split = jordan_split(&f, &opts).unwrap();
        let tv = split.total_variation();
        let r = split.bounds().unwrap();
        let identity = 2.0 * tv + f.eval(a).unwrap() - f.eval(b).unwrap();
        assert!((r.width() - identity).abs() <= 3.0 * opts.tol, "{text}: width {} vs {identity}", r.width());
        assert!(r.width() <= 3.0 * tv + 3.0 * opts.tol);
    }
}

#[test]
fn split_and_integral_forms_agree() {
    let f = ScalarFunction::on("x1*sin(x1) + 0.3*x1", -6.0, 6.0).unwrap();
    let split = jordan_split(&f, &TvOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let (x, y) = (rng.gen_range(-6.0..=6.0), rng.gen_range(-6.0..=6.0));
        let a = split.split_form(x, y).unwrap();
        let b = split.integral_form(x, y).unwrap();
        assert!((a - b).abs() < 1e-7, "({x}, {y}): {a} vs {b}");
    }
}

fn field() -> VectorField {
    VectorField::parse(2, &["x1*sin(x2) + x2^2", "exp(-x1)*x2 - x1"]).unwrap()
}

prop_compose! {
    fn arb_box()(lo in prop::array::uniform2(-2.0f64..2.0), w in prop::array::uniform2(0.0f64..1.5)) -> BoxDomain {
        BoxDomain::from_corners(&lo, &[lo[0] + w[0], lo[1] + w[1]]).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn larger_epsilon_only_widens(b in arb_box(), e1 in 0.0f64..0.5, de in 0.0f64..0.5) {
        let f = field();
        let jb = jacobian_bounds(&f, &b, 1e-9).unwrap();
        let tight = bound_box(&build_decomposition(&jb, e1).unwrap(), &f, &b).unwrap();
        let loose = bound_box(&build_decomposition(&jb, e1 + de).unwrap(), &f, &b).unwrap();
        for (t, l) in tight.iter().zip(&loose) {
            prop_assert!(l.encloses(t));
        }
    }

    #[test]
    fn refinement_is_nested_and_sound(b in arb_box(), seed in any::<u64>()) {
        let f = field();
        let opts = BoundOptions::default();
        let mut prev = refine_bounds(&f, &b, 0, &opts).unwrap();
        for depth in 1..5 {
            let next = refine_bounds(&f, &b, depth, &opts).unwrap();
            for (p, n) in prev.iter().zip(&next) {
                prop_assert!(p.encloses(n));
            }
            prev = next;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let p: Vec<f64> = b.sides().iter().map(|s| rng.gen_range(s.lo()..=s.hi())).collect();
            for (r, v) in prev.iter().zip(f.eval(&p).unwrap()) {
                prop_assert!(r.lo() <= v + 1e-9 && v <= r.hi() + 1e-9);
            }
        }
    }
}
