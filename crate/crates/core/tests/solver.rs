use papertorus::geometry::config::PUP_TENT_Z;
use papertorus::geometry::intersect::is_embedded_points;
use papertorus::geometry::{convex_hull, PupTentParams};
use papertorus::numeric::{pow10, Precision};
use papertorus::solver::newton::truncate_decimals;
use papertorus::solver::search::trace_csv;
use papertorus::solver::{
    angle_map, jacobian, newton_refine, newton_refine_traced, random_embedded_config, run_chains,
    JacobianMode, SearchSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

const P64: Precision = Precision::DEFAULT;

fn truncated_start(decimals: usize, p: Precision) -> PupTentParams {
    let full = PupTentParams::published(p);
    let z: Vec<String> = full
        .z
        .iter()
        .map(|z| truncate_decimals(z, decimals))
        .collect();
    PupTentParams::from_strs([&z[0], &z[1], &z[2]], p).unwrap()
}

/// Central differences of the angle map, independent of the library's own
/// difference mode.
fn fd_jacobian(p: &PupTentParams, prec: Precision, h: &Float) -> [[Float; 3]; 3] {
    let bits = prec.bits();
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut plus = p.clone();
            let mut minus = p.clone();
            plus.z[j] += h;
            minus.z[j] -= h;
            let a = angle_map(&plus, prec).unwrap().values[i].clone();
            let b = angle_map(&minus, prec).unwrap().values[i].clone();
            Float::with_val(bits, a - b) / Float::with_val(bits, h * 2u32)
        })
    })
}

#[test]
fn analytic_jacobian_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = pow10(-20, P64);
    for _ in 0..20 {
        let p = PupTentParams::new(
            PupTentParams::published(P64)
                .z
                .map(|z| z + P64.float(rng.random_range(-1e-4..=1e-4))),
        );
        let analytic = jacobian(&p, P64, JacobianMode::Analytic).unwrap().matrix;
        let fd = fd_jacobian(&p, P64, &h);
        for i in 0..3 {
            for j in 0..3 {
                let d = Float::with_val(P64.bits(), &analytic[i][j] - &fd[i][j]).abs();
                assert!(d < 1e-10, "entry {i}{j}: {d}");
            }
        }
    }
}

#[test]
fn jacobian_asymmetry_is_reported() {
    let r = jacobian(&PupTentParams::published(P64), P64, JacobianMode::Analytic).unwrap();
    // recorded, not required to vanish; it is tiny here
    assert!(r.asymmetry < 1e-3);
    let prod = papertorus::mat3::mul(&r.matrix, &r.inverse);
    for (i, row) in prod.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((x.to_f64() - expect).abs() < 1e-30);
        }
    }
}

#[test]
fn newton_from_eight_digits_recovers_published_heights() {
    let p = Precision::new(128);
    let target = pow10(-60, p);
    let o = newton_refine_traced(&truncated_start(8, p), &target, p).unwrap();
    assert!(o.iterations <= 20);
    assert!(angle_map(&o.params, p).unwrap().deviation() <= target);
    for (z, expected) in o.params.z.iter().zip(PUP_TENT_Z) {
        assert_eq!(truncate_decimals(z, 32), expected);
    }
}

#[test]
fn newton_converges_quadratically() {
    let p = Precision::new(200);
    let target = pow10(-100, p);
    let o = newton_refine_traced(&truncated_start(8, p), &target, p).unwrap();
    assert!(o.deviations.last().unwrap() <= &target);
    let logs: Vec<f64> = o.deviations.iter().map(|d| d.to_f64().log10()).collect();
    for w in logs.windows(2) {
        // exponent roughly doubles per step
        assert!(w[1] <= 1.7 * w[0], "{logs:?}");
    }
}

#[test]
fn newton_fixed_point_and_contract() {
    let p = Precision::new(96);
    let target = pow10(-40, p);
    let refined = newton_refine(&truncated_start(10, p), &target, p).unwrap();
    assert!(angle_map(&refined, p).unwrap().deviation() <= target);
    let again = newton_refine_traced(&refined, &target, p).unwrap();
    assert_eq!(again.iterations, 0);
    assert_eq!(again.params, refined);
}

fn small_spec(seed: u64) -> SearchSpec {
    SearchSpec {
        seed,
        chains: 3,
        max_iterations: 1500,
        ..SearchSpec::default()
    }
}

#[test]
fn random_start_is_embedded_on_the_sphere() {
    for seed in 0..5 {
        let spec = small_spec(seed);
        let c = random_embedded_config(&spec).unwrap();
        assert!(is_embedded_points(c.triangulation(), &c.to_f64()));
        assert!(c
            .to_f64()
            .iter()
            .all(|p| ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs() < 1e-12));
        assert!(convex_hull(&c).unwrap().all_on_hull());
    }
}

#[test]
fn search_is_reproducible_across_thread_counts() {
    let spec = small_spec(21);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let o = run_chains(&spec).unwrap();
            let summary: Vec<(u64, f64, String)> = o
                .chains
                .iter()
                .map(|c| (c.seed, c.max_deviation, trace_csv(&c.trace)))
                .collect();
            (o.best, summary, o.best().configuration.clone())
        })
    };
    let a = run(1);
    assert_eq!(a, run(2));
    let best = &a.1[a.0];
    assert!(a.1.iter().all(|c| c.1 >= best.1));
    // traces record improvements only
    let rows: Vec<f64> = best
        .2
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(rows.windows(2).all(|w| w[1] <= w[0]));
}
