//! Canonical digests of the two bundled chart fixtures.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::chart::{entries, to_tsv, ColorMode};
use crate::error::{Error, Result};
use crate::graded::GradedMorphism;
use crate::j2::J2Model;
use crate::label::Mono;
use crate::moore::{tmf_mod3, tmf_v1, torsion_action};
use crate::tmf::TmfTable;

pub const FIG_TMF_MAX: i64 = 36;
pub const FIG_J2_MAX: i64 = 40;
pub const TMF_KEY: &str = "tmf-mod3-0-36";
pub const J2_KEY: &str = "j2-0-40";
pub const TMF_FIXTURE: &str = include_str!("../fixtures/fig1.tsv");
pub const J2_FIXTURE: &str = include_str!("../fixtures/fig2.tsv");

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Classes and v1, α, β lines of π*tmf/3 for stems 0–36.
pub fn tmf_mod3_text(table: &TmfTable) -> Result<String> {
    let g = tmf_mod3(table)?;
    let mut classes: Vec<(i64, u32, String)> = (0..=FIG_TMF_MAX)
        .flat_map(|d| g.get(d).iter())
        .map(|s| (s.degree, s.filtration, s.label.to_string()))
        .collect();
    classes.sort();
    let mut out = String::new();
    for (d, f, l) in classes {
        let _ = writeln!(out, "class\t{d}\t{f}\t{l}");
    }
    let actions: [(&str, GradedMorphism); 3] = [
        ("v1", tmf_v1(table, &g)?),
        ("alpha", torsion_action(table, &g, &Mono::torsion(1, 0, 0))?),
        ("beta", torsion_action(table, &g, &Mono::torsion(0, 1, 0))?),
    ];
    for (name, f) in &actions {
        let mut lines = Vec::new();
        for d in 0..=FIG_TMF_MAX - f.degree_shift {
            let b = f.block(d);
            let (src, tgt) = (g.get(d), g.get(d + f.degree_shift));
            for j in 0..b.cols {
                for i in 0..b.rows {
                    let c = b.get(i, j).rem_euclid(3);
                    if c != 0 {
                        lines.push((d, src[j].label.to_string(), tgt[i].label.to_string(), c));
                    }
                }
            }
        }
        lines.sort();
        for (_, s, t, c) in lines {
            let _ = writeln!(out, "{name}\t{s}\t{t}\t{c}");
        }
    }
    Ok(out)
}

pub fn j2_text(model: &J2Model) -> String {
    to_tsv(&entries(&model.group, 0, FIG_J2_MAX, ColorMode::Provenance, &BTreeSet::new()))
}

fn line_diff(expected: &str, got: &str) -> String {
    let e: BTreeSet<&str> = expected.lines().collect();
    let g: BTreeSet<&str> = got.lines().collect();
    let mut s = String::new();
    for l in e.difference(&g) {
        let _ = writeln!(s, "- {l}");
    }
    for l in g.difference(&e) {
        let _ = writeln!(s, "+ {l}");
    }
    if s.is_empty() {
        s.push_str("(same lines, different order)\n");
    }
    s
}

fn check(name: &str, digests: &std::collections::BTreeMap<String, String>, fixture: &str, got: &str) -> Result<()> {
    let want = digests
        .get(name)
        .ok_or_else(|| Error::FixtureMismatch { name: name.into(), diff: "no digest in data file".into() })?;
    if &sha256_hex(got) == want {
        return Ok(());
    }
    let diff = if sha256_hex(fixture) == *want {
        line_diff(fixture, got)
    } else {
        format!("digest {want} does not match the bundled fixture either\n{}", line_diff(fixture, got))
    };
    Err(Error::FixtureMismatch { name: name.into(), diff })
}

pub fn check_tmf_mod3(table: &TmfTable) -> Result<()> {
    check(TMF_KEY, &table.data.digests, TMF_FIXTURE, &tmf_mod3_text(table)?)
}

pub fn check_j2(model: &J2Model) -> Result<()> {
    check(J2_KEY, &model.table.data.digests, J2_FIXTURE, &j2_text(model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tmf::TmfData;

    #[test]
    fn data_digests_match_bundled_fixtures() {
        let d = TmfData::builtin();
        assert_eq!(d.digests[TMF_KEY], sha256_hex(TMF_FIXTURE));
        assert_eq!(d.digests[J2_KEY], sha256_hex(J2_FIXTURE));
    }
}
