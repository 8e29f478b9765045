//! Moore-spectrum quotients: `X/3^r` via the universal coefficient sequence,
//! the v1 action on tmf/3, and the further quotients `X/(3, v1^j)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::{cokernel_gens, kernel_gens, solve_fiber_les, GradedGroup, GradedMorphism, Matrix, Order, Summand};
use crate::label::{Deco, Label, Mono};
use crate::tmf::TmfTable;

/// `π_d X/3^r = π_d X ⊗ Z/3^r ⊕ Tor(π_{d−1} X, Z/3^r)`, written as
/// `bar(x)` and `tilde(y)` summands. `bar_filt` gives the filtration of a bar
/// class; tilde classes sit one filtration below their source.
pub fn mod_power(x: &GradedGroup, r: u32, bar_filt: impl Fn(&Summand) -> u32) -> Result<GradedGroup> {
    let mut g = GradedGroup::new(x.max_degree);
    let degrees: BTreeSet<i64> = x.nonzero_degrees().collect();
    for d in degrees.iter().copied() {
        for s in x.get(d) {
            let k = s.order.exponent().map_or(r, |k| k.min(r));
            g.push(Summand::new(Label::bar(s.label.clone()), Order::Cyclic(k), d, bar_filt(s)))?;
        }
        if d < x.max_degree {
            for s in x.get(d) {
                if let Some(k) = s.order.exponent() {
                    let f = s.filtration.saturating_sub(1);
                    g.push(Summand::new(Label::tilde(s.label.clone()), Order::Cyclic(k.min(r)), d + 1, f))?;
                }
            }
        }
    }
    Ok(g)
}

/// π*tmf/3 with the mod-3 filtrations of the data file.
pub fn tmf_mod3(table: &TmfTable) -> Result<Arc<GradedGroup>> {
    tmf_mod_power(table, 1)
}

pub fn tmf_mod_power(table: &TmfTable, r: u32) -> Result<Arc<GradedGroup>> {
    let g = mod_power(&table.group, r, |s| s.label.mono().map_or(s.filtration, |m| table.bar_filtration(m)))?;
    Ok(Arc::new(g))
}

/// Reduction `X/3^r → X/3`: bars by 1, a tilde by 1 when its source has
/// order at least `3^r`, else 0.
pub fn reduction_map(
    base: &GradedGroup,
    src: Arc<GradedGroup>,
    tgt: Arc<GradedGroup>,
    r: u32,
) -> Result<GradedMorphism> {
    let mut f = GradedMorphism::new(src.clone(), tgt.clone(), 0);
    for d in src.nonzero_degrees().collect::<Vec<_>>() {
        let t = tgt.get(d);
        let mut m = Matrix::zeros(t.len(), src.get(d).len());
        for (j, s) in src.get(d).iter().enumerate() {
            let keep = match &s.label {
                Label::D(Deco::Tilde, y) => {
                    base.find(y).and_then(|b| b.order.exponent()).map_or(false, |k| k >= r)
                }
                _ => true,
            };
            if let Some(i) = t.iter().position(|x| x.label == s.label) {
                m.set(i, j, keep as i128);
            }
        }
        f.set_block(d, m)?;
    }
    Ok(f)
}

/// Build a morphism from a per-summand rule giving target labels with coefficients.
pub fn morphism_from_rule(
    src: Arc<GradedGroup>,
    tgt: Arc<GradedGroup>,
    shift: i64,
    rule: impl Fn(&Summand) -> Result<Vec<(Label, i128)>>,
) -> Result<GradedMorphism> {
    let mut f = GradedMorphism::new(src.clone(), tgt.clone(), shift);
    for d in src.nonzero_degrees().collect::<Vec<_>>() {
        if d + shift > tgt.max_degree {
            continue;
        }
        let t = tgt.get(d + shift);
        let mut m = Matrix::zeros(t.len(), src.get(d).len());
        for (j, s) in src.get(d).iter().enumerate() {
            for (lab, c) in rule(s)? {
                let i = t
                    .iter()
                    .position(|x| x.label == lab)
                    .ok_or_else(|| Error::InvalidGroup(format!("{lab} is not a class in degree {}", d + shift)))?;
                m.set(i, j, m.get(i, j) + c);
            }
        }
        f.set_block(d, m)?;
    }
    Ok(f)
}

fn deco_mono(l: &Label) -> Option<(Deco, Mono)> {
    match l {
        Label::D(k, inner) => inner.mono().map(|m| (*k, *m)),
        _ => None,
    }
}

fn shift_c(l: &Label, dc: u32) -> Label {
    match l {
        Label::M(m) => Label::M(m.with_c(m.c + dc)),
        Label::D(k, inner) => Label::deco(*k, shift_c(inner, dc)),
        other => other.clone(),
    }
}

/// Look a mod-3 class up in a Δ³-periodic list.
fn periodic_lookup<'a, T>(list: &'a [(Label, T)], kind: Deco, m: &Mono) -> Option<(&'a T, u32)> {
    let j = m.c / 3;
    let base = Label::deco(kind, Label::M(m.with_c(m.c % 3)));
    list.iter().find(|(l, _)| *l == base).map(|(_, t)| (t, 3 * j))
}

/// v1 on a single class of tmf/3; `None` is zero.
pub fn v1_image(table: &TmfTable, g: &GradedGroup, s: &Summand) -> Result<Option<Label>> {
    let (kind, m) = deco_mono(&s.label).ok_or_else(|| Error::Unresolved(s.label.to_string()))?;
    if let Some((t, dc)) = periodic_lookup(&table.data.v1_exceptions, kind, &m) {
        return Ok(t.as_ref().map(|t| shift_c(t, dc)));
    }
    let alpha = Mono::torsion(1, 0, 0);
    match kind {
        Deco::Bar if m.is_free() => {
            let t = if m.b == 1 {
                Some(Mono::free(0, m.a + 2, 0, m.c))
            } else if m.a >= 1 {
                Some(Mono::free(0, m.a - 1, 1, m.c))
            } else if m.c % 3 == 0 {
                return Ok(Some(Label::tilde(Label::M(Mono::torsion(1, 0, m.c)))));
            } else {
                None
            };
            if let Some(t) = t {
                let (e, _) = table.coefficient_rule(t.a, t.b, t.c);
                return Ok(Some(Label::bar(Label::M(Mono { e, ..t }))));
            }
        }
        Deco::Bar => {
            if s.degree + 3 <= table.max_degree {
                if let Some((p, _)) = table.multiply(&alpha, &m)?.as_single() {
                    return Ok(Some(Label::tilde(Label::M(p))));
                }
            }
        }
        Deco::Tilde if m.alpha == 1 && m.beta == 0 && m.c % 3 == 0 => {
            return Ok(Some(Label::bar(Label::M(Mono::free(0, 1, 0, m.c)))));
        }
        _ => {}
    }
    let d = s.degree + 4;
    if d > g.max_degree || g.get(d).iter().all(|t| t.filtration < s.filtration) {
        return Ok(None);
    }
    Err(Error::Unresolved(format!("v1 on {}", s.label)))
}

/// v1 as a degree-4 self-map of tmf/3.
pub fn tmf_v1(table: &TmfTable, g: &Arc<GradedGroup>) -> Result<GradedMorphism> {
    morphism_from_rule(g.clone(), g.clone(), 4, |s| {
        Ok(v1_image(table, g, s)?.into_iter().map(|l| (l, 1)).collect())
    })
}

/// Multiplication by a torsion generator of π*tmf on tmf/3.
pub fn torsion_action(table: &TmfTable, g: &Arc<GradedGroup>, x: &Mono) -> Result<GradedMorphism> {
    let shift = x.degree();
    morphism_from_rule(g.clone(), g.clone(), shift, |s| {
        let Some((kind, m)) = deco_mono(&s.label) else { return Ok(vec![]) };
        let src_deg = m.degree();
        if src_deg + shift > table.max_degree {
            return Ok(vec![]);
        }
        let p = table.multiply(x, &m)?;
        Ok(p.terms
            .iter()
            .filter(|(q, _)| q.is_torsion() || kind == Deco::Bar)
            .map(|(q, c)| (Label::deco(kind, Label::M(*q)), *c))
            .collect())
    })
}

/// ψ² on tmf/3. Bars are fixed (2^{even} ≡ 1); a tilde is fixed when its
/// degree has no bar classes, when it is a v1-multiple of a bar, or when the
/// data file records it. Anything else is an error.
pub fn psi_on_mod3(table: &TmfTable, g: &Arc<GradedGroup>, v1: &GradedMorphism) -> Result<GradedMorphism> {
    let mut f = GradedMorphism::new(g.clone(), g.clone(), 0);
    for d in g.nonzero_degrees().collect::<Vec<_>>() {
        let here = g.get(d);
        let has_bar = here.iter().any(|s| matches!(s.label, Label::D(Deco::Bar, _)));
        for (i, s) in here.iter().enumerate() {
            let Some((Deco::Tilde, m)) = deco_mono(&s.label) else { continue };
            if !has_bar || is_v1_multiple(g, v1, d, i) || periodic_lookup(&psi_fixed(table), Deco::Tilde, &m).is_some()
            {
                continue;
            }
            return Err(Error::Unresolved(format!("ψ² on {}", s.label)));
        }
        f.set_block(d, Matrix::identity(here.len()))?;
    }
    let mut minus = GradedMorphism::new(g.clone(), g.clone(), 0);
    for d in g.nonzero_degrees().collect::<Vec<_>>() {
        let mut b = f.block(d);
        for i in 0..b.rows {
            b.set(i, i, b.get(i, i) - 1);
        }
        minus.set_block(d, b)?;
    }
    Ok(minus)
}

fn psi_fixed(table: &TmfTable) -> Vec<(Label, ())> {
    table.data.psi_fixed.iter().map(|l| (l.clone(), ())).collect()
}

fn is_v1_multiple(g: &GradedGroup, v1: &GradedMorphism, d: i64, i: usize) -> bool {
    if d < 4 {
        return false;
    }
    let b = v1.block(d - 4);
    let src = g.get(d - 4);
    (0..b.cols).any(|j| {
        matches!(src[j].label, Label::D(Deco::Bar, _))
            && (0..b.rows).all(|r| b.get(r, j).rem_euclid(3) == (r == i) as i128)
    })
}

/// j²/3 as the fibre of ψ² − 1 on tmf/3, with the block-diagonal v1.
#[derive(Clone, Debug)]
pub struct J2Mod3 {
    pub group: Arc<GradedGroup>,
    pub v1: GradedMorphism,
}

pub fn j2_mod3_fiber(table: &TmfTable) -> Result<J2Mod3> {
    let g = tmf_mod3(table)?;
    let v1 = tmf_v1(table, &g)?;
    let psi = psi_on_mod3(table, &g, &v1)?;
    let fib = solve_fiber_les(&psi)?;
    let fg = Arc::new(fib.group);
    let images: BTreeMap<Label, Option<Label>> =
        g.iter().map(|s| Ok((s.label.clone(), v1_image(table, &g, s)?))).collect::<Result<_>>()?;
    let fv1 = morphism_from_rule(fg.clone(), fg.clone(), 4, |s| {
        let (inner, wrap) = match &s.label {
            Label::D(Deco::Boundary, inner) => (inner.as_ref(), true),
            other => (other, false),
        };
        let img = images.get(inner).cloned().flatten();
        Ok(img.map(|l| if wrap { Label::boundary(l) } else { l }).into_iter().map(|l| (l, 1)).collect())
    })?;
    Ok(J2Mod3 { group: fg, v1: fv1 })
}

/// `π_d X/(3, v1^j) = coker(v1^j into degree d) ⊕ ker(v1^j out of degree d − 1 − 4j)`.
pub fn mod_v1j(g: &Arc<GradedGroup>, v1: &GradedMorphism, j: u32) -> Result<GradedGroup> {
    let vj = v1_power(v1, j)?;
    let shift = vj.degree_shift;
    let mut out = GradedGroup::new(g.max_degree);
    for d in 0..=g.max_degree {
        let tgt = g.get(d);
        let src_d = d - shift;
        let ords = |s: &[Summand]| s.iter().map(|x| x.order).collect::<Vec<_>>();
        if !tgt.is_empty() {
            let src = g.get(src_d);
            let m = if src_d >= 0 { vj.block(src_d) } else { Matrix::zeros(tgt.len(), 0) };
            let src_o = if src_d >= 0 { ords(src) } else { vec![] };
            for gen in cokernel_gens(&m, &src_o, &ords(tgt))? {
                let s = &tgt[gen.pivot];
                out.push(Summand::new(Label::deco(Deco::Bar1, s.label.clone()), gen.order, d, s.filtration))?;
            }
        }
        let kd = d - 1 - shift;
        if kd >= 0 && d >= 1 {
            let src = g.get(kd);
            if !src.is_empty() {
                for gen in kernel_gens(&vj.block(kd), &ords(src), &ords(g.get(kd + shift)))? {
                    let s = &src[gen.pivot];
                    out.push(Summand::new(Label::deco(Deco::Tilde1, s.label.clone()), gen.order, d, s.filtration))?;
                }
            }
        }
    }
    Ok(out)
}

pub fn v1_power(v1: &GradedMorphism, j: u32) -> Result<GradedMorphism> {
    if j == 0 {
        return Err(Error::Check("v1^0 is not a quotient".into()));
    }
    let mut acc = v1.clone();
    for _ in 1..j {
        acc = v1.compose(&acc)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivityRow {
    pub big_d: i64,
    pub j: u32,
    pub source_degree: i64,
    pub source_dim: usize,
    pub target_dim: usize,
    pub injective: bool,
    /// `D = 144·s·3^n`, `n ≥ 1`, `3 ∤ s`, `2j ≤ s·3^n`.
    pub corollary: bool,
}

#[derive(Clone, Debug)]
pub struct InjectivityReport {
    pub rows: Vec<InjectivityRow>,
    /// Residues mod 18 of failing `j ≤ max_j`.
    pub failing_residues: BTreeSet<u32>,
    /// 18 or 36: the smallest period consistent with every row.
    pub supported_modulus: u32,
    /// A row refuting the other period, if any.
    pub witness: Option<InjectivityRow>,
    pub max_j: u32,
}

fn corollary_form(big_d: i64, j: u32) -> bool {
    if big_d % 144 != 0 {
        return false;
    }
    let mut q = big_d / 144;
    let mut pow = 1;
    while q % 3 == 0 {
        q /= 3;
        pow *= 3;
    }
    pow > 1 && 2 * j as i64 <= q * pow
}

/// Injectivity of `v1^j: π_{D−4j−2} tmf/3 → π_{D−2} tmf/3` for `D` a multiple
/// of 144, scanning `j ≤ max_j` and then every `j` with a nonnegative source.
pub fn v1_injectivity_report(g: &Arc<GradedGroup>, v1: &GradedMorphism, max_j: u32) -> Result<InjectivityReport> {
    let top = g.max_degree;
    let big_ds: Vec<i64> = (1..).map(|k| 144 * k).take_while(|d| *d <= top).collect();
    let jmax_all = big_ds.iter().map(|d| ((d - 2) / 4) as u32).max().unwrap_or(0).max(max_j);
    let mut rows = Vec::new();
    let mut vj = v1.clone();
    for j in 1..=jmax_all {
        if j > 1 {
            vj = v1.compose(&vj)?;
        }
        for &big_d in &big_ds {
            let sd = big_d - 4 * j as i64 - 2;
            if sd < 0 {
                continue;
            }
            let src: Vec<Order> = g.get(sd).iter().map(|s| s.order).collect();
            let tgt: Vec<Order> = g.get(big_d - 2).iter().map(|s| s.order).collect();
            let k = kernel_gens(&vj.block(sd), &src, &tgt)?;
            rows.push(InjectivityRow {
                big_d,
                j,
                source_degree: sd,
                source_dim: src.len(),
                target_dim: tgt.len(),
                injective: k.is_empty(),
                corollary: corollary_form(big_d, j),
            });
        }
    }
    let failing_residues = rows.iter().filter(|r| !r.injective && r.j <= max_j).map(|r| r.j % 18).collect();
    let consistent = |m: u32| -> Option<InjectivityRow> {
        let mut seen: BTreeMap<u32, bool> = BTreeMap::new();
        for r in &rows {
            if let Some(prev) = seen.insert(r.j % m, r.injective) {
                if prev != r.injective {
                    return Some(r.clone());
                }
            }
        }
        None
    };
    // A period-36 reading names the same residues mod 36; test it against the data.
    let claim36: BTreeSet<u32> =
        rows.iter().filter(|r| !r.injective && r.j <= max_j).map(|r| r.j % 36).collect();
    let refute36 = rows.iter().find(|r| claim36.contains(&(r.j % 36)) == r.injective).cloned();
    let (supported_modulus, witness) = match (consistent(18), refute36) {
        (None, w) => (18, w),
        (Some(w), _) => (36, Some(w)),
    };
    Ok(InjectivityReport { rows, failing_residues, supported_modulus, witness, max_j })
}

impl InjectivityReport {
    /// Table of the base scan: one line per `j ≤ max_j`, one column per `D`.
    pub fn render(&self) -> String {
        let ds: BTreeSet<i64> = self.rows.iter().map(|r| r.big_d).collect();
        let mut s = String::from("j\tj mod 18");
        for d in &ds {
            let _ = write!(s, "\tD={d}");
        }
        s.push('\n');
        for j in 1..=self.max_j {
            let _ = write!(s, "{j}\t{}", j % 18);
            for d in &ds {
                let cell = match self.rows.iter().find(|r| r.j == j && r.big_d == *d) {
                    Some(r) if r.injective => "inj",
                    Some(_) => "NOT",
                    None => "-",
                };
                let _ = write!(s, "\t{cell}");
            }
            s.push('\n');
        }
        let res: Vec<String> = self.failing_residues.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(s, "failing residues mod 18: {{{}}}", res.join(","));
        let _ = writeln!(s, "supported modulus: {}", self.supported_modulus);
        if let Some(w) = &self.witness {
            let _ = writeln!(
                s,
                "witness: D={} j={} (j mod 36 = {}) source degree {} dim {} injective={}",
                w.big_d,
                w.j,
                w.j % 36,
                w.source_degree,
                w.source_dim,
                w.injective
            );
        }
        let cor: Vec<String> =
            self.rows.iter().filter(|r| r.corollary).map(|r| format!("D={} j={} inj={}", r.big_d, r.j, r.injective)).collect();
        let _ = writeln!(s, "corollary cases: {}", if cor.is_empty() { "none".into() } else { cor.join("; ") });
        s
    }
}
