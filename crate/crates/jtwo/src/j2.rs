//! π*j²: the low sphere table spliced onto π*tmf^ψ at degree 23.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::{
    apply_extension_policy, solve_fiber_les, ExtensionProblem, ExtensionRule, GradedGroup, Order, RuleResolution,
    Summand,
};
use crate::label::{Deco, Label, Mono};
use crate::moore::{j2_mod3_fiber, mod_power, mod_v1j, tmf_mod3, tmf_v1, J2Mod3};
use crate::psi::{default_rules, psi_minus_one};
use crate::tmf::{TmfData, TmfTable, ZeroReason};

/// Last degree taken from the sphere table.
pub const SPLICE: i64 = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    SphereLow,
    KerLift,
    Boundary,
}

pub fn provenance(s: &Summand) -> Provenance {
    match &s.label {
        Label::Sphere(_) => Provenance::SphereLow,
        Label::D(Deco::Boundary, _) => Provenance::Boundary,
        _ => Provenance::KerLift,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtVerdict {
    Split,
    NonSplit,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct ExtensionAudit {
    pub degree: i64,
    pub verdict: ExtVerdict,
    /// dim π_d(j²/3) from the fibre of ψ² − 1 on tmf/3.
    pub fibre_dim: usize,
    pub split_dim: usize,
    pub nonsplit_dim: usize,
}

#[derive(Clone, Debug)]
pub struct J2Model {
    pub table: Arc<TmfTable>,
    pub group: Arc<GradedGroup>,
    /// π*tmf^ψ after extension resolution.
    pub psi: Arc<GradedGroup>,
    pub mod3: J2Mod3,
    pub audits: Vec<ExtensionAudit>,
    pub warnings: Vec<String>,
    pub max_degree: i64,
}

fn torsion_rank(g: &[Summand]) -> usize {
    g.iter().filter(|s| s.order != Order::Free).count()
}

/// Decide an extension by comparing `dim π_d(j²/3)` computed from the fibre
/// of ψ² − 1 on tmf/3 with the two candidate groups.
pub fn resolve_extension_via_mod3(
    problem: &ExtensionProblem,
    fibre: &GradedGroup,
    below: &[Summand],
) -> ExtensionAudit {
    let fibre_dim = fibre.rank(problem.degree);
    let tor = torsion_rank(below);
    let split_dim = problem.split_group().len() + tor;
    let nonsplit_dim = problem.maximal_nonsplit().len() + tor;
    let verdict = if problem.sub.is_empty() || problem.quotient.is_empty() {
        ExtVerdict::Split
    } else {
        match (split_dim == fibre_dim, nonsplit_dim == fibre_dim) {
            (true, false) => ExtVerdict::Split,
            (false, true) => ExtVerdict::NonSplit,
            _ => ExtVerdict::Inconclusive,
        }
    };
    ExtensionAudit { degree: problem.degree, verdict, fibre_dim, split_dim, nonsplit_dim }
}

fn sphere_group(data: &TmfData, max: i64) -> Result<GradedGroup> {
    let mut g = GradedGroup::new(max);
    for e in data.sphere.iter().filter(|e| e.degree <= SPLICE.min(max)) {
        if e.degree > 0 && e.order == Order::Free {
            return Err(Error::InvalidGroup(format!("sphere class {} in positive degree is free", e.name)));
        }
        g.push(Summand::new(Label::Sphere(e.name.clone()), e.order, e.degree, e.filtration))?;
    }
    if g.get(0).len() != 1 || g.get(0)[0].order != Order::Free {
        return Err(Error::InvalidGroup("sphere degree 0 must be a single free summand".into()));
    }
    Ok(g)
}

impl J2Model {
    /// π*j² through `max_degree` (the tmf table is built one degree higher).
    pub fn build(max_degree: i64, data: &TmfData) -> Result<J2Model> {
        let table = TmfTable::build(max_degree + 1, data)?;
        assemble_j2(Arc::new(table))
    }

    pub fn sphere_image(&self, name: &str) -> Option<&Label> {
        self.table.data.sphere.iter().find(|e| e.name == name).map(|e| &e.image)
    }

    /// π*j²/3 as `⊗ Z/3 ⊕ Tor`.
    pub fn tensor_mod3(&self) -> Result<GradedGroup> {
        mod_power(&self.group, 1, |s| s.filtration)
    }

    /// Degrees `≥ from` where the two mod-3 computations disagree in dimension.
    pub fn mod3_mismatches(&self, from: i64) -> Result<Vec<(i64, usize, usize)>> {
        let t = self.tensor_mod3()?;
        Ok((from..self.max_degree)
            .filter_map(|d| {
                let (a, b) = (t.rank(d), self.mod3.group.rank(d));
                (a != b).then_some((d, a, b))
            })
            .collect())
    }

    /// Rank of the filtration-1 part of π_d.
    pub fn filtration_one_rank(&self, d: i64) -> usize {
        self.group.get(d).iter().filter(|s| s.filtration == 1).count()
    }
}

pub fn assemble_j2(table: Arc<TmfTable>) -> Result<J2Model> {
    let max = table.max_degree - 1;
    let fib = solve_fiber_les(&psi_minus_one(&table)?)?;
    let mod3 = j2_mod3_fiber(&table)?;

    // Resolve in increasing degree; each audit reads the already-resolved degree below.
    let mut rules: Vec<ExtensionRule> = Vec::new();
    let mut audits = Vec::new();
    let mut warnings = Vec::new();
    let mut current = fib.group.clone();
    let mut problems = fib.problems.clone();
    problems.sort_by_key(|p| p.degree);
    for p in &problems {
        let below = current.get(p.degree - 1).to_vec();
        let a = resolve_extension_via_mod3(p, &mod3.group, &below);
        let res = match a.verdict {
            ExtVerdict::Split => Some(RuleResolution::Split),
            ExtVerdict::NonSplit => Some(RuleResolution::NonSplit),
            ExtVerdict::Inconclusive => None,
        };
        let policy = default_rules().into_iter().find(|r| r.matches(p.degree)).map(|r| r.resolution);
        if let (Some(r), Some(pol)) = (res, policy) {
            if r != pol {
                warnings.push(format!("degree {}: dimension count contradicts the default rule", p.degree));
            }
        }
        let chosen = match res.or(policy) {
            Some(r) => r,
            None => {
                warnings.push(format!("degree {}: inconclusive, resolved as split", p.degree));
                RuleResolution::Split
            }
        };
        let rule = ExtensionRule { modulus: i64::MAX, residue: p.degree, resolution: chosen };
        let out = apply_extension_policy(&current, std::slice::from_ref(p), std::slice::from_ref(&rule))?;
        current = out.group;
        rules.push(rule);
        audits.push(a);
    }
    let psi = Arc::new(current);

    let sphere = sphere_group(&table.data, max)?;
    check_seam(&table, &sphere, &psi)?;
    let mut g = GradedGroup::new(max);
    for d in 0..=max {
        let src = if d <= SPLICE { sphere.get(d) } else { psi.get(d) };
        g.extend(src.iter().cloned())?;
    }
    Ok(J2Model { table, group: Arc::new(g), psi, mod3, audits, warnings, max_degree: max })
}

/// Degrees 20–22 must agree between the sphere table and tmf^ψ, class by class.
fn check_seam(table: &TmfTable, sphere: &GradedGroup, psi: &GradedGroup) -> Result<()> {
    for d in 20..=SPLICE.min(psi.max_degree) {
        let mut a: Vec<(Label, Order)> = sphere
            .get(d)
            .iter()
            .map(|s| {
                let Label::Sphere(name) = &s.label else { unreachable!() };
                let img = table.data.sphere.iter().find(|e| &e.name == name).unwrap().image.clone();
                (img, s.order)
            })
            .collect();
        let mut b: Vec<(Label, Order)> = psi.get(d).iter().map(|s| (s.label.clone(), s.order)).collect();
        a.sort();
        b.sort();
        if a != b {
            return Err(Error::Seam(d, format!("sphere {a:?} vs tmf^ψ {b:?}")));
        }
    }
    Ok(())
}

/// Result of a product in π*j².
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum J2Product {
    Zero,
    Class(Vec<(Label, i128)>),
    Unknown,
}

impl J2Product {
    pub fn is_nonzero(&self) -> bool {
        matches!(self, J2Product::Class(v) if !v.is_empty())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    Ker(Mono),
    Bdry(Mono),
}

impl J2Model {
    fn part(&self, l: &Label) -> Option<Part> {
        match l {
            Label::M(m) => Some(Part::Ker(*m)),
            Label::D(Deco::Boundary, inner) => inner.mono().map(|m| Part::Bdry(*m)),
            Label::Sphere(name) => self.sphere_image(name).and_then(|i| self.part(i)),
            _ => None,
        }
    }

    /// Name of a tmf^ψ class as it appears in π*j² (sphere names below the splice).
    pub fn j2_label(&self, l: Label) -> Option<Label> {
        let d = match &l {
            Label::M(m) => m.degree(),
            Label::D(_, inner) => inner.core_mono()?.degree() - 1,
            Label::Sphere(_) => return Some(l),
        };
        if d > SPLICE {
            return Some(l);
        }
        self.table.data.sphere.iter().find(|e| e.image == l).map(|e| Label::Sphere(e.name.clone()))
    }

    pub fn multiply_j2(&self, x: &Label, y: &Label) -> Result<J2Product> {
        let (Some(px), Some(py)) = (self.part(x), self.part(y)) else {
            return Ok(J2Product::Unknown);
        };
        let deg = |p: Part| match p {
            Part::Ker(m) => m.degree(),
            Part::Bdry(m) => m.degree() - 1,
        };
        let d = deg(px) + deg(py);
        if d > self.max_degree {
            return Err(Error::DegreeOutOfRange { degree: d, max: self.max_degree });
        }
        let (m, n, boundary) = match (px, py) {
            (Part::Ker(a), Part::Ker(b)) => (a, b, false),
            (Part::Ker(a), Part::Bdry(b)) | (Part::Bdry(b), Part::Ker(a)) => (a, b, true),
            (Part::Bdry(_), Part::Bdry(_)) => {
                let any_bdry = self.group.get(d).iter().any(|s| provenance(s) == Provenance::Boundary);
                return Ok(if any_bdry { J2Product::Unknown } else { J2Product::Zero });
            }
        };
        let p = self.table.multiply(&m, &n)?;
        if p.is_zero() {
            return Ok(match p.zero_reason {
                Some(ZeroReason::TableDefault) => J2Product::Unknown,
                _ => J2Product::Zero,
            });
        }
        let mut out = Vec::new();
        for (q, c) in &p.terms {
            let label = if boundary { Label::boundary(Label::M(*q)) } else { Label::M(*q) };
            let Some(label) = self.j2_label(label) else { return Ok(J2Product::Unknown) };
            let Some(s) = self.group.find(&label) else {
                if boundary {
                    // Killed in the cokernel: the class has order 1.
                    continue;
                }
                return Ok(J2Product::Unknown);
            };
            let c = match s.order {
                Order::Free => *c,
                o => c.rem_euclid(o.modulus()),
            };
            if c != 0 {
                out.push((label, c));
            }
        }
        Ok(if out.is_empty() { J2Product::Zero } else { J2Product::Class(out) })
    }
}

#[derive(Clone, Debug)]
pub struct LiftStep {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// The chain of exact-sequence checks that lifts Δ⁶ to the (3, v1) quotient.
pub fn verify_periodicity_lift(model: &J2Model) -> Result<Vec<LiftStep>> {
    if model.max_degree < 164 {
        return Err(Error::DegreeOutOfRange { degree: 164, max: model.max_degree });
    }
    let g = &model.group;
    let mut steps = Vec::new();
    let mut push = |name, passed, detail: String| steps.push(LiftStep { name, passed, detail });

    push("π144 j² = 0", g.get(144).is_empty(), format!("{} summands", g.get(144).len()));

    let max143 = g.get(143).iter().filter_map(|s| s.order.exponent()).max().unwrap_or(0);
    let all_torsion = g.get(143).iter().all(|s| s.order != Order::Free);
    push("π143 j² is 27-torsion", all_torsion && max143 == 3, format!("max order 3^{max143}"));

    let tensor27: usize = g.get(144).iter().map(|s| s.order.exponent().map_or(3, |k| k.min(3)) as usize).sum();
    push("π144 j² ⊗ Z/27 = 0", tensor27 == 0, format!("log3 order {tensor27}"));

    let tg = tmf_mod3(&model.table)?;
    let tv1 = tmf_v1(&model.table, &tg)?;
    let t31 = mod_v1j(&tg, &tv1, 1)?;
    push("π145 tmf/(3,v1) = 0", t31.get(145).is_empty(), format!("{} summands", t31.get(145).len()));

    let j31 = mod_v1j(&model.mod3.group, &model.mod3.v1, 1)?;
    let here = j31.get(144);
    let gen_ok =
        here.len() == 1 && here[0].order == Order::Cyclic(1) && here[0].label.core_mono() == Some(&Mono::delta(6));
    push(
        "π144 j²/(3,v1) ≅ F3 generated by the lift of ∂Δ⁶",
        gen_ok,
        here.iter().map(|s| s.label.to_string()).collect::<Vec<_>>().join(", "),
    );

    let b2d6 = Mono::torsion(0, 2, 6);
    let in_tmf = model.table.group.find(&Label::M(b2d6)).is_some();
    let bd = Label::boundary(Label::M(b2d6));
    let in_j2 = g.get(163).iter().any(|s| s.label == bd);
    push("∂(β²Δ⁶) ≠ 0 in π163 j²", in_tmf && in_j2, format!("β²Δ⁶ in tmf: {in_tmf}; ∂ class present: {in_j2}"));
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_model() {
        let m = J2Model::build(60, &TmfData::builtin()).unwrap();
        assert_eq!(m.group.get(10).len(), 1);
        assert_eq!(m.group.get(27).len(), 2);
        let a = m.audits.iter().find(|a| a.degree == 27).unwrap();
        assert_eq!(a.verdict, ExtVerdict::Split);
        assert_eq!(a.fibre_dim, 3);
        let b = Label::Sphere("b1".into());
        let dad = Label::boundary(Label::M("a*D".parse().unwrap()));
        let p = m.multiply_j2(&b, &dad).unwrap();
        assert_eq!(p, J2Product::Class(vec![(Label::boundary(Label::M("a*b*D".parse().unwrap())), 1)]));
        assert_eq!(m.multiply_j2(&Label::Sphere("1".into()), &dad).unwrap(), J2Product::Class(vec![(dad, 1)]));
    }
}
