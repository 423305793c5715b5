//! `info` and `sample`: domain tables and random points.

use std::io::Write;

use bsd_kuramoto_core::domains::{
    dims, family_chain, sample_bs_boundary_with, sample_interior_with, DomainKind, DomainSpec, FamilyMember,
};
use bsd_kuramoto_core::groups::GroupSpec;
use bsd_kuramoto_core::sampling::rng_from_seed;

use crate::scenario::{cmat_to_matrix, parse_kind};
use crate::CliError;

fn bad(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.into(),
        message: message.into(),
    }
}

/// Parses `kind m n`; types II and III need `m = n`.
pub fn domain_from_args(kind: &str, m: usize, n: usize) -> Result<DomainSpec, CliError> {
    let k = parse_kind(kind).ok_or_else(|| bad("kind", format!("expected I, II or III, got {kind:?}")))?;
    if k != DomainKind::TypeI && m != n {
        return Err(bad("m", format!("type {} needs m = n, got m = {m}, n = {n}", k.roman())));
    }
    DomainSpec::new(k, m, n).map_err(|e| bad(if m < n { "m" } else { "n" }, e.to_string()))
}

/// Identification of the BS boundary of one chain member.
pub fn bs_label(f: &FamilyMember) -> String {
    let (m, n) = (f.m, f.n);
    match f.kind {
        DomainKind::TypeI if n == 1 => format!("S^{} (sphere)", 2 * m - 1),
        DomainKind::TypeI if m == n => format!("U({n}) (unitary)"),
        DomainKind::TypeI => format!("St_{{{m},{n}}}(C) (complex Stiefel manifold)"),
        DomainKind::TypeII if n == 1 => "point".into(),
        DomainKind::TypeII if n == 2 => "U(2)/Sp(1) ≅ S^1 (antisymmetric unitary)".into(),
        DomainKind::TypeII if n % 2 == 0 => format!("U({n})/Sp({}) (antisymmetric unitary)", n / 2),
        DomainKind::TypeII => format!("rank-{} antisymmetric partial isometries", n - 1),
        DomainKind::TypeIII if n == 1 => "U(1) ≅ S^1 (symmetric unitary)".into(),
        DomainKind::TypeIII => format!("U({n})/O({n}) (symmetric unitary)"),
    }
}

pub fn info(kind: &str, m: usize, n: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = domain_from_args(kind, m, n)?;
    let group = GroupSpec::for_domain(&spec);
    let chain = family_chain(&spec);
    let d = dims(&spec);
    let top = chain[0];
    writeln!(out, "domain      {}", top.domain_label())?;
    writeln!(out, "group       {}", group.name())?;
    writeln!(out, "BS boundary {}", bs_label(&top))?;
    writeln!(out, "real dims   domain {}, BS boundary {}", d.domain_real, d.bs)?;
    let labels: Vec<String> = chain.iter().map(FamilyMember::model_label).collect();
    writeln!(out, "chain       {}", labels.join(", "))?;
    writeln!(out)?;
    writeln!(out, "{:<3} {:<14} {:<12} {:>8} {:>8}  BS boundary", "t", "model", "domain", "dim D", "dim BS")?;
    for f in &chain {
        let fd = f.dims();
        writeln!(
            out,
            "{:<3} {:<14} {:<12} {:>8} {:>8}  {}",
            f.t,
            f.model_label(),
            f.domain_label(),
            fd.domain_real,
            fd.bs,
            bs_label(f)
        )?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleRegion {
    Boundary,
    Interior,
}

/// Prints `count` points as JSON matrices of `[re, im]` pairs, one per line.
pub fn sample(
    kind: &str,
    m: usize,
    n: usize,
    seed: u64,
    region: SampleRegion,
    count: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let spec = domain_from_args(kind, m, n)?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..count {
        let z = match region {
            SampleRegion::Boundary => sample_bs_boundary_with(&spec, &mut rng),
            SampleRegion::Interior => sample_interior_with(&spec, &mut rng),
        };
        serde_json::to_writer(&mut *out, &cmat_to_matrix(&z))?;
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(kind: &str, m: usize, n: usize) -> String {
        let mut buf = Vec::new();
        info(kind, m, n, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn type_i_square_chain() {
        let s = render("I", 2, 2);
        assert!(s.contains("chain       KM_{2,2}(I), KM_{1,1}(I)"));
        assert!(s.contains("SU(2,2)"));
        assert!(s.contains("domain 8, BS boundary 4"));
    }

    #[test]
    fn sphere_family_has_one_member() {
        let s = render("I", 3, 1);
        assert!(s.contains("chain       KM_{3,1}(I)\n"));
        assert!(s.contains("S^5"));
    }

    #[test]
    fn type_ii_chain_ends_on_circle() {
        let s = render("II", 4, 4);
        assert!(s.contains("KM_4(II), KM_2(II)\n"));
        assert!(s.trim_end().ends_with("≅ S^1 (antisymmetric unitary)"));
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let mut buf = Vec::new();
        assert_eq!(info("III", 2, 3, &mut buf).unwrap_err().exit_code(), 2);
        assert_eq!(info("I", 1, 2, &mut buf).unwrap_err().exit_code(), 2);
        assert_eq!(info("IV", 2, 2, &mut buf).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn samples_are_seeded() {
        let draw = |seed| {
            let mut buf = Vec::new();
            sample("III", 2, 2, seed, SampleRegion::Boundary, 3, &mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
        assert_eq!(draw(7).lines().count(), 3);
    }
}
