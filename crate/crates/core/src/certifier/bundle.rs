//! Certificate bundles: a strict line format that `verify` replays against
//! a torus file.
//!
//! ```text
//! papertorus-certificates v1
//! scale_exp 32
//! grid 300
//! lambda 6000000000000000000000000000000
//! 0-14 disjoint L=(-258,300,-300) 1 42000000000000000000000000000000
//! 0-3 shared:0 L=(-258,300,-300) 1 42000000000000000000000000000000
//! ift precision 64
//! ift flatness_at_p 1.234567890e-33
//! ...
//! sha256 <hex digest of every line above>
//! ```
//!
//! Only the canonical rendering is accepted, so any edit either fails to
//! parse, changes the rendering, or changes a replayed value. Some edits
//! leave a valid certificate (a direction component that does not affect
//! the margin), so the digest pins the exact bytes as well.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::bounds::crude_bound_certificate;
use super::ift::{ift_from_parts, ExistenceCertificate};
use super::scaled::scale_to_integers_with;
use super::separation::{
    certify_robust_embedding, relevant_pairs, verify_certificate, SeparationCertificate,
    SeparationKind, SeparationParams,
};
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::numeric::Precision;

pub const BUNDLE_HEADER: &str = "papertorus-certificates v1";
const DIGEST_KEY: &str = "sha256";

fn digest(body: &str) -> String {
    format!("{:x}", Sha256::digest(body.as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IftFooter {
    pub precision: u32,
    pub flatness_at_p: String,
    pub min_abs_eigenvalue: String,
    pub df_minus_m_inf: String,
    pub conclusion_radius: String,
}

impl IftFooter {
    pub fn from_certificate(cert: &ExistenceCertificate) -> Self {
        let sci = |x: &rug::Float| format!("{:.9e}", x.to_f64());
        IftFooter {
            precision: cert.precision.digits(),
            flatness_at_p: sci(&cert.flatness_at_p),
            min_abs_eigenvalue: sci(&cert.min_abs_eigenvalue),
            df_minus_m_inf: sci(&cert.df_minus_m_inf),
            conclusion_radius: sci(&cert.conclusion_radius),
        }
    }

    fn fields(&self) -> [(&'static str, String); 5] {
        [
            ("precision", self.precision.to_string()),
            ("flatness_at_p", self.flatness_at_p.clone()),
            ("min_abs_eigenvalue", self.min_abs_eigenvalue.clone()),
            ("df_minus_m_inf", self.df_minus_m_inf.clone()),
            ("conclusion_radius", self.conclusion_radius.clone()),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateBundle {
    pub scale_exp: u32,
    pub params: SeparationParams,
    pub certificates: Vec<SeparationCertificate>,
    pub ift: Option<IftFooter>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub certificates: usize,
    /// Smallest replayed margin, as a decimal string.
    pub min_margin: String,
    pub ift_checked: bool,
}

pub fn format_certificate(c: &SeparationCertificate) -> String {
    let kind = match c.kind {
        SeparationKind::Disjoint => "disjoint".to_string(),
        SeparationKind::SharedVertex { vertex } => format!("shared:{vertex}"),
    };
    let [x, y, z] = c.direction;
    format!(
        "{}-{} {kind} L=({x},{y},{z}) {} {}",
        c.pair.0, c.pair.1, c.side, c.margin
    )
}

pub fn format_bundle(b: &CertificateBundle) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{BUNDLE_HEADER}");
    let _ = writeln!(out, "scale_exp {}", b.scale_exp);
    let _ = writeln!(out, "grid {}", b.params.grid);
    let _ = writeln!(out, "lambda {}", b.params.lambda);
    for c in &b.certificates {
        let _ = writeln!(out, "{}", format_certificate(c));
    }
    if let Some(f) = &b.ift {
        for (k, v) in f.fields() {
            let _ = writeln!(out, "ift {k} {v}");
        }
    }
    let d = digest(&out);
    let _ = writeln!(out, "{DIGEST_KEY} {d}");
    out
}

fn parse_certificate(line: usize, text: &str) -> Result<SeparationCertificate> {
    let err = |m: &str| Error::parse(line, m.to_string());
    let parts: Vec<&str> = text.split(' ').collect();
    let [pair, kind, dir, side, margin] = parts.as_slice() else {
        return Err(err("expected `<a>-<b> <kind> L=(x,y,z) <side> <margin>`"));
    };
    let (a, b) = pair
        .split_once('-')
        .ok_or_else(|| err("pair must be `<a>-<b>`"))?;
    let pair = (
        a.parse().map_err(|_| err("bad face index"))?,
        b.parse().map_err(|_| err("bad face index"))?,
    );
    let kind = match *kind {
        "disjoint" => SeparationKind::Disjoint,
        k => match k.strip_prefix("shared:") {
            Some(v) => SeparationKind::SharedVertex {
                vertex: v.parse().map_err(|_| err("bad shared vertex"))?,
            },
            None => return Err(err("kind must be `disjoint` or `shared:<v>`")),
        },
    };
    let inner = dir
        .strip_prefix("L=(")
        .and_then(|d| d.strip_suffix(')'))
        .ok_or_else(|| err("direction must be `L=(x,y,z)`"))?;
    let comps: Vec<i64> = inner
        .split(',')
        .map(|s| s.parse().map_err(|_| err("bad direction component")))
        .collect::<Result<_>>()?;
    let direction: [i64; 3] = comps
        .try_into()
        .map_err(|_| err("direction needs 3 components"))?;
    let side = match *side {
        "0" => 0,
        "1" => 1,
        _ => return Err(err("side must be 0 or 1")),
    };
    let margin = margin.parse().map_err(|_| err("bad margin"))?;
    Ok(SeparationCertificate {
        pair,
        kind,
        direction,
        side,
        margin,
    })
}

pub fn parse_bundle(text: &str) -> Result<CertificateBundle> {
    let body_end = text.trim_end_matches('\n').rfind('\n').map_or(0, |i| i + 1);
    let (body, last) = text.split_at(body_end);
    let lines: Vec<&str> = body.lines().collect();
    let digest_line = lines.len() + 1;
    let claimed = last
        .trim_end_matches('\n')
        .strip_prefix(DIGEST_KEY)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| {
            Error::parse(
                digest_line,
                format!("expected `{DIGEST_KEY} <hex>` as the last line"),
            )
        })?;
    let mut i = 0;
    let mut next = |what: &str| -> Result<(usize, &str)> {
        let l = lines
            .get(i)
            .copied()
            .ok_or_else(|| Error::parse(i + 1, format!("missing {what}")))?;
        i += 1;
        Ok((i, l))
    };
    let (n, l) = next("header")?;
    if l != BUNDLE_HEADER {
        return Err(Error::parse(n, format!("expected `{BUNDLE_HEADER}`")));
    }
    let mut field = |key: &str| -> Result<(usize, String)> {
        let (n, l) = next(key)?;
        l.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .map(|v| (n, v.to_string()))
            .ok_or_else(|| Error::parse(n, format!("expected `{key} <value>`")))
    };
    let (n, v) = field("scale_exp")?;
    let scale_exp = v.parse().map_err(|_| Error::parse(n, "bad scale_exp"))?;
    let (n, v) = field("grid")?;
    let grid = v.parse().map_err(|_| Error::parse(n, "bad grid"))?;
    let (n, v) = field("lambda")?;
    let lambda = v.parse().map_err(|_| Error::parse(n, "bad lambda"))?;

    let mut certificates = Vec::new();
    let mut footer: Vec<(usize, &str, &str)> = Vec::new();
    for (k, l) in lines.iter().enumerate().skip(4) {
        let n = k + 1;
        if let Some(rest) = l.strip_prefix("ift ") {
            let (key, value) = rest
                .split_once(' ')
                .ok_or_else(|| Error::parse(n, "expected `ift <key> <value>`"))?;
            footer.push((n, key, value));
        } else if !footer.is_empty() {
            return Err(Error::parse(n, "certificate after the ift footer"));
        } else {
            certificates.push(parse_certificate(n, l)?);
        }
    }
    let ift = if footer.is_empty() {
        None
    } else {
        let keys = [
            "precision",
            "flatness_at_p",
            "min_abs_eigenvalue",
            "df_minus_m_inf",
            "conclusion_radius",
        ];
        if footer.len() != keys.len() {
            return Err(Error::parse(
                footer[0].0,
                format!("ift footer needs {} lines", keys.len()),
            ));
        }
        for ((n, key, _), want) in footer.iter().zip(keys) {
            if *key != want {
                return Err(Error::parse(*n, format!("expected ift key `{want}`")));
            }
        }
        Some(IftFooter {
            precision: footer[0]
                .2
                .parse()
                .map_err(|_| Error::parse(footer[0].0, "bad precision"))?,
            flatness_at_p: footer[1].2.to_string(),
            min_abs_eigenvalue: footer[2].2.to_string(),
            df_minus_m_inf: footer[3].2.to_string(),
            conclusion_radius: footer[4].2.to_string(),
        })
    };
    if claimed != digest(body) {
        return Err(Error::CertificateMismatch(format!(
            "{DIGEST_KEY} digest on line {digest_line} does not match"
        )));
    }
    Ok(CertificateBundle {
        scale_exp,
        params: SeparationParams { grid, lambda },
        certificates,
        ift,
    })
}

/// Certify every relevant pair of `c` and, if `ift` is given, append the
/// footer of the existence chain at that precision.
pub fn build_bundle(
    c: &Configuration,
    scale_exp: u32,
    params: &SeparationParams,
    ift: Option<Precision>,
) -> Result<CertificateBundle> {
    let sc = scale_to_integers_with(c, scale_exp)?;
    let certificates = certify_robust_embedding(&sc, params)?;
    let ift = match ift {
        Some(precision) => {
            let crude = crude_bound_certificate(c)?;
            let cert = ift_from_parts(c, precision, crude, certificates.len(), true)?;
            Some(IftFooter::from_certificate(&cert))
        }
        None => None,
    };
    Ok(CertificateBundle {
        scale_exp,
        params: *params,
        certificates,
        ift,
    })
}

/// Replay `text` against `c`: canonical form, the expected scale and
/// separation parameters, one certificate per relevant pair in order, every
/// margin bit-for-bit, and the ift footer recomputed from scratch.
pub fn verify_bundle(
    text: &str,
    c: &Configuration,
    scale_exp: u32,
    params: &SeparationParams,
) -> Result<VerifyReport> {
    let b = parse_bundle(text)?;
    if format_bundle(&b) != text {
        return Err(Error::CertificateMismatch(
            "bundle is not in canonical form".into(),
        ));
    }
    if b.scale_exp != scale_exp || b.params != *params {
        return Err(Error::CertificateMismatch(format!(
            "bundle claims scale 10^{}, grid {}, lambda {}; expected 10^{scale_exp}, {}, {}",
            b.scale_exp, b.params.grid, b.params.lambda, params.grid, params.lambda
        )));
    }
    let sc = scale_to_integers_with(c, scale_exp)?;
    let pairs = relevant_pairs(&sc);
    let claimed: Vec<(usize, usize)> = b.certificates.iter().map(|c| c.pair).collect();
    if claimed != pairs {
        return Err(Error::CertificateMismatch(format!(
            "bundle covers {} pairs, torus needs {} in canonical order",
            claimed.len(),
            pairs.len()
        )));
    }
    for cert in &b.certificates {
        verify_certificate(&sc, cert, params)?;
    }
    let min_margin = b
        .certificates
        .iter()
        .map(|c| c.margin)
        .min()
        .map_or("none".into(), |m| m.to_string());

    if let Some(footer) = &b.ift {
        let crude = crude_bound_certificate(c)?;
        let cert = ift_from_parts(
            c,
            Precision::new(footer.precision),
            crude,
            b.certificates.len(),
            true,
        )?;
        let recomputed = IftFooter::from_certificate(&cert);
        if recomputed != *footer {
            return Err(Error::CertificateMismatch(format!(
                "ift footer differs from recomputation: {recomputed:?}"
            )));
        }
    }
    Ok(VerifyReport {
        certificates: b.certificates.len(),
        min_margin,
        ift_checked: b.ift.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CertificateBundle {
        CertificateBundle {
            scale_exp: 32,
            params: SeparationParams::default(),
            certificates: vec![
                SeparationCertificate {
                    pair: (0, 14),
                    kind: SeparationKind::Disjoint,
                    direction: [-258, 300, -300],
                    side: 1,
                    margin: 42 * 10i128.pow(30),
                },
                SeparationCertificate {
                    pair: (0, 3),
                    kind: SeparationKind::SharedVertex { vertex: 0 },
                    direction: [-258, 300, -300],
                    side: 1,
                    margin: 7,
                },
            ],
            ift: Some(IftFooter {
                precision: 64,
                flatness_at_p: "1.000000000e-33".into(),
                min_abs_eigenvalue: "7.624800000e-1".into(),
                df_minus_m_inf: "9.410000000e-3".into(),
                conclusion_radius: "1.000000000e-13".into(),
            }),
        }
    }

    #[test]
    fn round_trip() {
        let text = format_bundle(&sample());
        assert_eq!(parse_bundle(&text).unwrap(), sample());
        assert!(text.contains("0-3 shared:0 L=(-258,300,-300) 1 7\n"));
    }

    #[test]
    fn rejects_malformed_lines() {
        let text = format_bundle(&sample());
        for bad in [
            text.replace("disjoint", "disjointx"),
            text.replace("L=(-258,300,-300) 1 42", "L=(-258,300) 1 42"),
            text.replace(" 1 7\n", " 2 7\n"),
            text.replace("ift precision 64\n", ""),
            text.replace("grid 300", "grid x"),
        ] {
            assert!(
                matches!(parse_bundle(&bad), Err(Error::Parse { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn digest_pins_every_byte() {
        let text = format_bundle(&sample());
        let edited = text.replace("L=(-258,300,-300) 1 7", "L=(-258,300,-299) 1 7");
        assert!(matches!(
            parse_bundle(&edited),
            Err(Error::CertificateMismatch(_))
        ));
        let truncated: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert!(parse_bundle(&truncated).is_err());
    }
}
