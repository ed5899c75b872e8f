use papertorus::certifier::separation::disjoint_margins;
use papertorus::certifier::{
    build_bundle, certify_robust_embedding, crude_bound_certificate, format_bundle,
    ift_certificate, relevant_pairs, scale_to_integers, vector_bounds_check, verify_bundle,
    verify_certificate, SeparationKind, SeparationParams,
};
use papertorus::combinatorics::triangulation::shared_vertices;
use papertorus::error::Error;
use papertorus::geometry::intersect::triangles_intersect;
use papertorus::geometry::{
    build_pup_tent, is_embedded_float, tri_pair_relation, Configuration, PupTentParams,
};
use papertorus::numeric::{pow10, Precision};
use papertorus::solver::angle_map;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Integer};

mod common;
use common::{g_relative_errors, oracle_margin, oracle_scaled, theta};

const P64: Precision = Precision::DEFAULT;

fn pup_tent() -> Configuration {
    build_pup_tent(&PupTentParams::published(P64), P64).unwrap()
}

#[test]
fn certificates_replay_independently() {
    let c = pup_tent();
    let sc = scale_to_integers(&c).unwrap();
    let pts = oracle_scaled();
    for (v, p) in sc.coordinates.iter().enumerate() {
        for k in 0..3 {
            assert_eq!(Integer::from(p[k]), pts[v][k]);
        }
    }
    let certs = certify_robust_embedding(&sc, &SeparationParams::default()).unwrap();
    assert_eq!(certs.len(), 96);
    let disjoint = certs
        .iter()
        .filter(|x| x.kind == SeparationKind::Disjoint)
        .count();
    assert_eq!((disjoint, certs.len() - disjoint), (24, 72));
    let lambda = Integer::from(6) * Integer::from(Integer::u_pow_u(10, 30));
    for cert in &certs {
        let m = oracle_margin(&pts, c.triangulation().faces(), cert);
        assert_eq!(m, cert.margin);
        assert!(m > lambda);
        let shared = shared_vertices(
            c.triangulation().faces()[cert.pair.0],
            c.triangulation().faces()[cert.pair.1],
        );
        match cert.kind {
            SeparationKind::Disjoint => assert!(shared.is_empty()),
            SeparationKind::SharedVertex { vertex } => assert_eq!(shared, vec![vertex]),
        }
    }
}

#[test]
fn certified_margins_are_monotone() {
    let sc = scale_to_integers(&pup_tent()).unwrap();
    let certs = certify_robust_embedding(&sc, &SeparationParams::default()).unwrap();
    for cert in certs.iter().step_by(5) {
        for lambda in [cert.margin - 1, cert.margin / 2, 0, -cert.margin] {
            let params = SeparationParams {
                lambda,
                ..SeparationParams::default()
            };
            verify_certificate(&sc, cert, &params).unwrap();
        }
        let strict = SeparationParams {
            lambda: cert.margin,
            ..SeparationParams::default()
        };
        assert!(verify_certificate(&sc, cert, &strict).is_err());
    }
    let half = SeparationParams {
        lambda: SeparationParams::default().lambda / 2,
        ..SeparationParams::default()
    };
    assert_eq!(certify_robust_embedding(&sc, &half).unwrap().len(), 96);
}

#[test]
fn separating_directions_agree_with_float_intersection() {
    let c = pup_tent();
    let sc = scale_to_integers(&c).unwrap();
    let pts = c.to_f64();
    let tri = |f: usize| c.triangulation().faces()[f].map(|v| pts[v]);
    let disjoint: Vec<(usize, usize)> = relevant_pairs(&sc)
        .into_iter()
        .filter(|&(a, b)| {
            shared_vertices(c.triangulation().faces()[a], c.triangulation().faces()[b]).is_empty()
        })
        .collect();
    assert_eq!(disjoint.len(), 24);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut separated = 0;
    for _ in 0..50 {
        let l: [i64; 3] = [0; 3].map(|_| rng.random_range(-300..=300));
        for &(a, b) in &disjoint {
            let (s0, s1) = disjoint_margins(&sc.triangle(a), &sc.triangle(b), &l);
            if s0 > 0 || s1 > 0 {
                separated += 1;
                assert!(!triangles_intersect(&tri(a), &tri(b)));
            }
        }
    }
    assert!(separated > 0);
    for &(a, b) in &disjoint {
        assert!(!triangles_intersect(&tri(a), &tri(b)));
    }
}

#[test]
fn far_perturbation_breaks_certification() {
    let mut params = PupTentParams::published(P64);
    params.z[0] = P64.float(0.5);
    let c = build_pup_tent(&params, P64).unwrap();
    // the float test sees a real crossing
    assert!(!is_embedded_float(&c));
    let n = c.triangulation().faces().len();
    let crossing = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .any(|(a, b)| tri_pair_relation(&c, a, b).intersects == Some(true));
    assert!(crossing);
    let sc = scale_to_integers(&c).unwrap();
    match certify_robust_embedding(&sc, &SeparationParams::default()) {
        Err(Error::NoCertificateFound { .. }) => {}
        other => panic!("expected a failed pair, got {other:?}"),
    }
}

#[test]
fn g_formulas_match_second_differences() {
    for (rel11, rel12) in g_relative_errors(&pup_tent(), 20, 13) {
        assert!(rel11 < 1e-5 && rel12 < 1e-5, "{rel11} {rel12}");
    }
}

#[test]
fn unfriendly_terms_cancel() {
    // the three angles of a triangle sum to pi, so their second derivatives
    // in one vertex height sum to zero
    let c = pup_tent();
    let bits = P64.bits();
    let h = pow10(-10, P64);
    for f in c.triangulation().faces() {
        for &a in f {
            let total = |dz: i32| {
                let pts: Vec<[Float; 3]> = f
                    .iter()
                    .map(|&v| {
                        let mut p = c.point(v).clone();
                        if v == a {
                            p[2] += Float::with_val(bits, &h * dz);
                        }
                        p
                    })
                    .collect();
                (0..3).fold(Float::new(bits), |s, r| {
                    let o = &pts[r];
                    let d = |q: &[Float; 3]| -> [Float; 3] {
                        std::array::from_fn(|i| Float::with_val(bits, &q[i] - &o[i]))
                    };
                    s + theta(&d(&pts[(r + 1) % 3]), &d(&pts[(r + 2) % 3]))
                })
            };
            let second = Float::with_val(
                bits,
                total(1) - Float::with_val(bits, total(0) * 2u32) + total(-1),
            ) / Float::with_val(bits, h.square_ref());
            assert!(second.abs() < 1e-8);
        }
    }
}

#[test]
fn direct_second_derivatives_far_below_crude_bound() {
    let p = PupTentParams::published(P64);
    let bits = P64.bits();
    let h = pow10(-10, P64);
    let at = |di: (usize, i32), dj: (usize, i32)| {
        let mut q = p.clone();
        q.z[di.0] += Float::with_val(bits, &h * di.1);
        q.z[dj.0] += Float::with_val(bits, &h * dj.1);
        angle_map(&q, P64).unwrap().values
    };
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let (pp, pm, mp, mm) = (
                at((i, 1), (j, 1)),
                at((i, 1), (j, -1)),
                at((i, -1), (j, 1)),
                at((i, -1), (j, -1)),
            );
            for k in 0..3 {
                let num =
                    Float::with_val(bits, &pp[k] - &pm[k]) - Float::with_val(bits, &mp[k] - &mm[k]);
                let d = num / Float::with_val(bits, h.square_ref()) * 4u32;
                worst = worst.max(d.to_f64().abs());
            }
        }
    }
    let crude = crude_bound_certificate(&pup_tent()).unwrap();
    assert!(worst < crude.second_derivative_bound);
    assert!(worst < 1e2);
}

#[test]
fn vector_windows_hold_at_the_published_point() {
    let r = vector_bounds_check(&pup_tent(), 1e-4).unwrap();
    assert_eq!(r.entries.len(), 96);
    for e in &r.entries {
        assert!(e.norm_v1 >= 0.48 && e.norm_v1 <= 2.4);
        assert!(e.norm_v2 >= 0.48 && e.norm_v2 <= 2.4);
        assert!(e.norm_cross >= 0.85 && e.norm_cross <= 2.4);
    }
    let crude = crude_bound_certificate(&pup_tent()).unwrap();
    assert!(crude.g12_max < 10.0);
    assert!(crude.g11_max < 1e14);
    assert!(crude.friendly_term_count <= 48);
}

#[test]
fn chain_verdicts_agree_across_precisions() {
    for digits in [48, 64, 100] {
        let p = Precision::new(digits);
        let cert =
            ift_certificate(&build_pup_tent(&PupTentParams::published(p), p).unwrap(), p).unwrap();
        assert!(cert.links.iter().all(|l| l.holds));
        assert!(cert.min_abs_eigenvalue > 0.76);
        assert!(cert.df_minus_m_inf < 0.01);
    }
}

fn reseal(text: &str) -> String {
    use sha2::{Digest, Sha256};
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with("sha256 "))
        .map(|l| format!("{l}\n"))
        .collect();
    format!("{body}sha256 {:x}\n", Sha256::digest(body.as_bytes()))
}

#[test]
fn any_tampered_certificate_byte_is_rejected() {
    let c = pup_tent();
    let params = SeparationParams::default();
    let text = format_bundle(&build_bundle(&c, 32, &params, Some(P64)).unwrap());
    verify_bundle(&text, &c, 32, &params).unwrap();
    assert_eq!(reseal(&text), text);
    let pts = oracle_scaled();
    let lambda = Integer::from(6) * Integer::from(Integer::u_pow_u(10, 30));
    let bytes = text.as_bytes();
    let mut line_start = 0;
    let mut tried = 0;
    let mut resealed_valid = 0;
    for line in text.split_inclusive('\n') {
        if line.contains(" L=(") {
            for i in line_start..line_start + line.len() - 1 {
                let mut t = bytes.to_vec();
                t[i] = match t[i] {
                    b'0'..=b'8' => t[i] + 1,
                    b'9' => b'0',
                    b'-' => b'+',
                    _ => b'#',
                };
                let t = String::from_utf8(t).unwrap();
                assert!(
                    verify_bundle(&t, &c, 32, &params).is_err(),
                    "byte {i} of {line:?}"
                );
                tried += 1;
                // with a fresh digest, replay alone must still be sound
                if let Ok(b) = papertorus::certifier::parse_bundle(&reseal(&t)) {
                    if verify_bundle(&reseal(&t), &c, 32, &params).is_ok() {
                        resealed_valid += 1;
                        for cert in &b.certificates {
                            let m = oracle_margin(&pts, c.triangulation().faces(), cert);
                            assert_eq!(m, cert.margin);
                            assert!(m > lambda);
                            assert_eq!(cert.direction.iter().map(|x| x.abs()).max(), Some(300));
                        }
                    }
                }
            }
        }
        line_start += line.len();
    }
    assert!(tried > 96 * 40);
    assert!(resealed_valid < tried / 100);
}

#[test]
fn bundle_from_other_parameters_is_rejected() {
    let c = pup_tent();
    let params = SeparationParams::default();
    let weak = SeparationParams {
        lambda: 1,
        ..params
    };
    let text = format_bundle(&build_bundle(&c, 32, &weak, None).unwrap());
    assert!(verify_bundle(&text, &c, 32, &weak).is_ok());
    assert!(verify_bundle(&text, &c, 32, &params).is_err());
}
