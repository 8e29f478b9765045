//! The Adams operation ψ² on π*tmf and the fibre tmf^ψ of ψ² − 1.

use std::sync::Arc;

use crate::error::Result;
use crate::graded::{
    apply_extension_policy, reduce, solve_fiber_les, ExtensionProblem, ExtensionRule, GradedGroup, GradedMorphism,
    Matrix, RuleResolution,
};
use crate::label::Label;
use crate::tmf::TmfTable;

/// ν₃(2^d − 1): zero for odd `d`, else `1 + ν₃(d/2)`.
pub fn nu3_2pow_minus_1(d: u64) -> u32 {
    if d == 0 || d % 2 == 1 {
        return 0;
    }
    let mut h = d / 2;
    let mut v = 1;
    while h % 3 == 0 {
        h /= 3;
        v += 1;
    }
    v
}

/// Diagonal map `ψ² − 1` on the summands of π*tmf.
pub fn psi_minus_one(table: &TmfTable) -> Result<GradedMorphism> {
    let g = table.group.clone();
    let mut f = GradedMorphism::new(g.clone(), g.clone(), 0);
    for d in g.nonzero_degrees().collect::<Vec<_>>() {
        let entries: Vec<i128> = g
            .get(d)
            .iter()
            .map(|s| match &s.label {
                Label::M(m) if m.is_free() => reduce(table.psi_scalar(2, m) - 1),
                _ => 0,
            })
            .collect();
        f.set_block(d, Matrix::diagonal(&entries))?;
    }
    Ok(f)
}

pub fn default_rules() -> Vec<ExtensionRule> {
    vec![ExtensionRule { modulus: 72, residue: 27, resolution: RuleResolution::Split }]
}

#[derive(Clone, Debug)]
pub struct TmfPsi {
    pub group: Arc<GradedGroup>,
    /// Problems after the rule set has been applied.
    pub problems: Vec<ExtensionProblem>,
    pub warnings: Vec<String>,
}

/// π*tmf^ψ up to `table.max_degree − 1`.
pub fn tmf_psi(table: &TmfTable, rules: &[ExtensionRule]) -> Result<TmfPsi> {
    let fib = solve_fiber_les(&psi_minus_one(table)?)?;
    let out = apply_extension_policy(&fib.group, &fib.problems, rules)?;
    Ok(TmfPsi { group: Arc::new(out.group), problems: out.resolved, warnings: out.warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::Order;
    use crate::tmf::TmfData;

    #[test]
    fn nu3_examples() {
        assert_eq!(nu3_2pow_minus_1(3), 0);
        assert_eq!(nu3_2pow_minus_1(2), 1);
        assert_eq!(nu3_2pow_minus_1(6), 2);
        assert_eq!(nu3_2pow_minus_1(18), 3);
    }

    #[test]
    fn low_degrees() {
        let t = TmfTable::build(80, &TmfData::builtin()).unwrap();
        let p = tmf_psi(&t, &default_rules()).unwrap();
        let g = &p.group;
        assert_eq!(g.get(0).len(), 1);
        assert_eq!(g.get(0)[0].order, Order::Free);
        let d23: Vec<String> = g.get(23).iter().map(|s| s.label.to_string()).collect();
        assert_eq!(d23.len(), 2);
        assert!(d23.contains(&"∂(3Δ)".to_string()));
        assert!(g.get(23).iter().all(|s| s.order == Order::Cyclic(2)));
        assert_eq!(g.get(27).len(), 2);
        // 27 is covered by the default rule; αΔ³ in degree 75 falls back to split.
        let degs: Vec<i64> = p.problems.iter().map(|q| q.degree).collect();
        assert_eq!(degs, vec![27, 75]);
        assert_eq!(p.warnings.len(), 1);
    }
}
