//! The curated model of π*tmf at p = 3.
//!
//! Free part: monomials `3^e c4^a c6^b Δ^c` with `b ≤ 1`, `e` from the
//! FREE-RULE section. Torsion: the seed list in degrees 1–72, repeated by Δ³.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::{pow3, GradedGroup, Order, Summand};
use crate::label::{Label, Mono};

pub const PERIOD: i64 = 72;
const DEFAULT_DATA: &str = include_str!("../data/tmf3.dat");

#[derive(Clone, Debug)]
pub struct TorsionSeed {
    pub mono: Mono,
    pub degree: i64,
    pub order: u32,
    pub filtration: u32,
}

#[derive(Clone, Debug)]
pub struct FreeRule {
    pub a: Option<u32>,
    pub b: Option<u32>,
    pub c_mod3: Option<u32>,
    pub e: u32,
    pub bar_filtration: u32,
}

#[derive(Clone, Debug)]
pub struct ProductEntry {
    pub x: Mono,
    pub y: Mono,
    pub sign: i128,
    pub result: Mono,
}

#[derive(Clone, Debug)]
pub struct SphereEntry {
    pub name: String,
    pub degree: i64,
    pub order: Order,
    pub filtration: u32,
    pub image: Label,
}

/// Parsed contents of a data file.
#[derive(Clone, Debug, Default)]
pub struct TmfData {
    pub torsion: Vec<TorsionSeed>,
    pub free_rule: Vec<FreeRule>,
    pub products: Vec<ProductEntry>,
    /// v1 on a mod-3 class; `None` means zero. Periodic under Δ³.
    pub v1_exceptions: Vec<(Label, Option<Label>)>,
    /// Tilde classes whose ψ²-invariance is recorded as data.
    pub psi_fixed: Vec<Label>,
    pub sphere: Vec<SphereEntry>,
    pub digests: BTreeMap<String, String>,
}

fn parse_wild(s: &str) -> Result<Option<u32>> {
    if s == "*" {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|_| Error::parse(format!("bad number `{s}`")))
    }
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::parse(format!("bad number `{s}`")))
}

impl TmfData {
    pub fn default_text() -> &'static str {
        DEFAULT_DATA
    }

    pub fn builtin() -> TmfData {
        TmfData::parse(DEFAULT_DATA).expect("bundled data file parses")
    }

    pub fn from_path(path: &Path) -> Result<TmfData> {
        TmfData::parse(&std::fs::read_to_string(path)?)
    }

    /// Explicit path, then `JTWO_DATA`, then the bundled file.
    pub fn resolve(path: Option<&Path>) -> Result<TmfData> {
        if let Some(p) = path {
            return TmfData::from_path(p);
        }
        match std::env::var_os("JTWO_DATA") {
            Some(p) if !p.is_empty() => TmfData::from_path(Path::new(&p)),
            _ => Ok(TmfData::builtin()),
        }
    }

    pub fn parse(text: &str) -> Result<TmfData> {
        let mut d = TmfData::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].to_string();
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::parse(format!("line {}: malformed `{line}`", lineno + 1));
            match section.as_str() {
                "TORSION" => {
                    if f.len() != 4 {
                        return Err(bad());
                    }
                    let order = Order::parse(f[2])?.exponent().ok_or_else(bad)?;
                    d.torsion.push(TorsionSeed {
                        mono: f[0].parse()?,
                        degree: num(f[1])?,
                        order,
                        filtration: num(f[3])?,
                    });
                }
                "FREE-RULE" => {
                    if f.len() != 5 {
                        return Err(bad());
                    }
                    d.free_rule.push(FreeRule {
                        a: parse_wild(f[0])?,
                        b: parse_wild(f[1])?,
                        c_mod3: parse_wild(f[2])?,
                        e: num(f[3])?,
                        bar_filtration: num(f[4])?,
                    });
                }
                "PRODUCTS" => {
                    if f.len() != 4 {
                        return Err(bad());
                    }
                    let sign = match f[2] {
                        "+" => 1,
                        "-" => -1,
                        _ => return Err(bad()),
                    };
                    d.products.push(ProductEntry { x: f[0].parse()?, y: f[1].parse()?, sign, result: f[3].parse()? });
                }
                "V1-EXCEPTIONS" => {
                    if f.len() != 2 {
                        return Err(bad());
                    }
                    if f[0] == "psi-fixed" {
                        d.psi_fixed.push(Label::parse(f[1])?);
                    } else {
                        let tgt = if f[1] == "0" { None } else { Some(Label::parse(f[1])?) };
                        d.v1_exceptions.push((Label::parse(f[0])?, tgt));
                    }
                }
                "SPHERE" => {
                    if f.len() != 5 {
                        return Err(bad());
                    }
                    d.sphere.push(SphereEntry {
                        name: f[0].to_string(),
                        degree: num(f[1])?,
                        order: Order::parse(f[2])?,
                        filtration: num(f[3])?,
                        image: Label::parse(f[4])?,
                    });
                }
                "FIXTURE-DIGESTS" => {
                    if f.len() != 2 {
                        return Err(bad());
                    }
                    d.digests.insert(f[0].to_string(), f[1].to_string());
                }
                other => return Err(Error::parse(format!("line {}: unknown section `{other}`", lineno + 1))),
            }
        }
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        for s in &self.torsion {
            if s.mono.degree() != s.degree {
                return Err(Error::parse(format!("seed {} has degree {}, not {}", s.mono, s.mono.degree(), s.degree)));
            }
            if !(1..=PERIOD).contains(&s.degree) || s.mono.c >= 3 || !s.mono.is_torsion() {
                return Err(Error::parse(format!("seed {} outside the fundamental window", s.mono)));
            }
        }
        for p in &self.products {
            if p.x.degree() + p.y.degree() != p.result.degree() {
                return Err(Error::parse(format!("product {} * {} = {} is not degree-homogeneous", p.x, p.y, p.result)));
            }
        }
        if !self.free_rule.iter().any(|r| r.a.is_none() && r.b.is_none() && r.c_mod3.is_none()) {
            return Err(Error::parse("FREE-RULE needs a catch-all line"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroReason {
    /// Target degree has no class of the right kind.
    Degree,
    /// A defining relation (c4α = 0, 3·torsion = 0, …).
    Relation,
    /// Unlisted torsion product in a degree that does have torsion.
    TableDefault,
}

/// Linear combination of basis monomials.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Element {
    pub terms: BTreeMap<Mono, i128>,
    pub zero_reason: Option<ZeroReason>,
}

impl Element {
    pub fn zero(reason: ZeroReason) -> Element {
        Element { terms: BTreeMap::new(), zero_reason: Some(reason) }
    }

    pub fn single(m: Mono, coeff: i128) -> Element {
        let mut e = Element::default();
        e.terms.insert(m, coeff);
        e.normalize()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Reduce torsion coefficients mod 3 and drop zero terms.
    pub fn normalize(mut self) -> Element {
        self.terms = self
            .terms
            .into_iter()
            .map(|(m, c)| if m.is_torsion() { (m, c.rem_euclid(3)) } else { (m, c) })
            .filter(|(_, c)| *c != 0)
            .collect();
        if self.terms.is_empty() && self.zero_reason.is_none() {
            self.zero_reason = Some(ZeroReason::Relation);
        }
        if !self.terms.is_empty() {
            self.zero_reason = None;
        }
        self
    }

    pub fn add(mut self, o: &Element) -> Element {
        for (m, c) in &o.terms {
            let slot = self.terms.entry(*m).or_insert(0);
            *slot = slot.checked_add(*c).expect("coefficient overflow");
        }
        if self.zero_reason.is_none() {
            self.zero_reason = o.zero_reason;
        }
        self.normalize()
    }

    pub fn scale(mut self, k: i128) -> Element {
        for c in self.terms.values_mut() {
            *c = c.checked_mul(k).expect("coefficient overflow");
        }
        self.normalize()
    }

    /// The unique term of a one-term element.
    pub fn as_single(&self) -> Option<(Mono, i128)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (*m, *c))
        } else {
            None
        }
    }
}

/// Image under the q-expansion map: `coeff · u^u_power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KoClass {
    pub coeff: i128,
    pub u_power: u32,
}

#[derive(Clone, Debug)]
pub struct TmfTable {
    pub data: TmfData,
    pub max_degree: i64,
    pub group: Arc<GradedGroup>,
}

impl TmfTable {
    /// Expand the data file to `max_degree` and check structural invariants.
    pub fn build(max_degree: i64, data: &TmfData) -> Result<TmfTable> {
        let mut t = TmfTable { data: data.clone(), max_degree, group: Arc::new(GradedGroup::new(max_degree)) };
        let mut g = GradedGroup::new(max_degree);
        for d in 0..=max_degree {
            for m in t.free_basis(d) {
                g.push(Summand::new(Label::M(m), Order::Free, d, 0))?;
            }
            for s in t.torsion_basis(d) {
                g.push(Summand::new(Label::M(s.mono), Order::Cyclic(s.order), d, s.filtration))?;
            }
        }
        t.group = Arc::new(g);
        t.check_periodicity()?;
        Ok(t)
    }

    fn check_periodicity(&self) -> Result<()> {
        for d in 1..=self.max_degree - PERIOD {
            let lo = self.torsion_basis(d);
            let hi = self.torsion_basis(d + PERIOD);
            let shifted: Vec<Mono> = lo.iter().map(|s| s.mono.with_c(s.mono.c + 3)).collect();
            let top: Vec<Mono> = hi.iter().map(|s| s.mono).collect();
            if shifted != top {
                return Err(Error::InvalidGroup(format!("Δ³ is not injective on torsion in degree {d}")));
            }
        }
        Ok(())
    }

    /// `(e, bar filtration)` for the monomial `c4^a c6^b Δ^c`.
    pub fn coefficient_rule(&self, a: u32, b: u32, c: u32) -> (u32, u32) {
        self.data
            .free_rule
            .iter()
            .find(|r| {
                r.a.map_or(true, |x| x == a) && r.b.map_or(true, |x| x == b) && r.c_mod3.map_or(true, |x| x == c % 3)
            })
            .map(|r| (r.e, r.bar_filtration))
            .unwrap_or((0, 0))
    }

    /// Monomials `3^e c4^a c6^b Δ^c` with `8a + 12b + 24c = d`, `b ≤ 1`.
    pub fn free_basis(&self, d: i64) -> Vec<Mono> {
        let mut out = Vec::new();
        if d < 0 || d % 4 != 0 {
            return out;
        }
        for c in 0..=d / 24 {
            for b in 0..=1i64 {
                let rest = d - 24 * c - 12 * b;
                if rest >= 0 && rest % 8 == 0 {
                    let (a, b, c) = ((rest / 8) as u32, b as u32, c as u32);
                    let (e, _) = self.coefficient_rule(a, b, c);
                    out.push(Mono::free(e, a, b, c));
                }
            }
        }
        out.sort();
        out
    }

    pub fn torsion_basis(&self, d: i64) -> Vec<TorsionSeed> {
        if d < 1 {
            return Vec::new();
        }
        let j = (d - 1) / PERIOD;
        let base = d - j * PERIOD;
        let mut out: Vec<TorsionSeed> = self
            .data
            .torsion
            .iter()
            .filter(|s| s.degree == base)
            .map(|s| TorsionSeed { mono: s.mono.with_c(s.mono.c + 3 * j as u32), degree: d, ..s.clone() })
            .collect();
        out.sort_by_key(|s| s.mono);
        out
    }

    /// Seed and Δ³-power of a torsion monomial, if it is a basis element.
    fn seed_of(&self, m: &Mono) -> Option<(&TorsionSeed, u32)> {
        if !m.is_torsion() || m.e != 0 || m.a != 0 || m.b != 0 {
            return None;
        }
        self.data
            .torsion
            .iter()
            .find(|s| s.mono.alpha == m.alpha && s.mono.beta == m.beta && s.mono.c == m.c % 3)
            .map(|s| (s, m.c / 3))
    }

    pub fn is_basis(&self, m: &Mono) -> bool {
        if m.is_torsion() {
            self.seed_of(m).is_some()
        } else {
            m.b <= 1 && self.coefficient_rule(m.a, m.b, m.c).0 == m.e
        }
    }

    pub fn an_filtration(&self, m: &Mono) -> u32 {
        self.seed_of(m).map_or(0, |(s, _)| s.filtration)
    }

    /// Filtration of the mod-3 reduction of a basis class.
    pub fn bar_filtration(&self, m: &Mono) -> u32 {
        if m.is_torsion() {
            self.an_filtration(m)
        } else {
            self.coefficient_rule(m.a, m.b, m.c).1
        }
    }

    pub fn order(&self, m: &Mono) -> Order {
        match self.seed_of(m) {
            Some((s, _)) => Order::Cyclic(s.order),
            None => Order::Free,
        }
    }

    /// Rewrite `3^e c4^a c6^b Δ^c` (any `b`) in the basis.
    pub fn express_free(&self, m: &Mono, coeff: i128) -> Result<Element> {
        if m.b >= 2 {
            // c6² = c4³ − 1728Δ
            let rest = Mono { b: m.b - 2, ..*m };
            let first = self.express_free(&Mono { a: rest.a + 3, ..rest }, coeff)?;
            let second = self.express_free(&Mono { c: rest.c + 1, ..rest }, -1728 * coeff)?;
            return Ok(first.add(&second));
        }
        let (e0, _) = self.coefficient_rule(m.a, m.b, m.c);
        let bare = Mono::free(e0, m.a, m.b, m.c);
        let mut k = coeff;
        let mut e = m.e;
        while e < e0 {
            if k % 3 != 0 {
                return Err(Error::InvalidGroup(format!("{m} is not a class of π*tmf")));
            }
            k /= 3;
            e += 1;
        }
        Ok(Element::single(bare, k * pow3(e - e0)))
    }

    /// Product of two basis monomials.
    pub fn multiply(&self, x: &Mono, y: &Mono) -> Result<Element> {
        let d = x.degree() + y.degree();
        if d > self.max_degree {
            return Err(Error::DegreeOutOfRange { degree: d, max: self.max_degree });
        }
        for m in [x, y] {
            if !self.is_basis(m) {
                return Err(Error::InvalidGroup(format!("{m} is not a basis monomial")));
            }
        }
        match (x.is_torsion(), y.is_torsion()) {
            (false, false) => self.express_free(&x.times(y), 1),
            (true, false) => Ok(self.torsion_times_free(x, y)),
            (false, true) => Ok(self.torsion_times_free(y, x)),
            (true, true) => self.torsion_product(x, y),
        }
    }

    fn torsion_times_free(&self, t: &Mono, f: &Mono) -> Element {
        if f.e == 0 && f.a == 0 && f.b == 0 && f.c % 3 == 0 {
            Element::single(t.with_c(t.c + f.c), 1)
        } else {
            Element::zero(ZeroReason::Relation)
        }
    }

    fn torsion_product(&self, x: &Mono, y: &Mono) -> Result<Element> {
        let (sx, jx) = self.seed_of(x).unwrap();
        let (sy, jy) = self.seed_of(y).unwrap();
        let hit = self.data.products.iter().find(|p| {
            (p.x == sx.mono && p.y == sy.mono) || (p.x == sy.mono && p.y == sx.mono)
        });
        match hit {
            Some(p) => {
                let r = p.result.with_c(p.result.c + 3 * (jx + jy));
                if !self.is_basis(&r) {
                    return Err(Error::InvalidGroup(format!("product result {r} is not a basis class")));
                }
                Ok(Element::single(r, p.sign))
            }
            None => {
                let d = x.degree() + y.degree();
                if self.torsion_basis(d).is_empty() {
                    Ok(Element::zero(ZeroReason::Degree))
                } else {
                    Ok(Element::zero(ZeroReason::TableDefault))
                }
            }
        }
    }

    /// Product of two elements.
    pub fn multiply_elements(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut out = Element::default();
        let mut reason = None;
        for (mx, cx) in &x.terms {
            for (my, cy) in &y.terms {
                let p = self.multiply(mx, my)?;
                if p.is_zero() && reason.is_none() {
                    reason = p.zero_reason;
                }
                out = out.add(&p.scale(cx * cy));
            }
        }
        if out.is_zero() {
            out.zero_reason = reason.or(x.zero_reason).or(y.zero_reason).or(Some(ZeroReason::Relation));
        }
        Ok(out)
    }

    pub fn q_expansion(&self, m: &Mono) -> KoClass {
        let u_power = (m.degree() / 4) as u32;
        if m.is_torsion() || m.c > 0 {
            KoClass { coeff: 0, u_power }
        } else {
            KoClass { coeff: pow3(m.e), u_power }
        }
    }

    pub fn q_expansion_element(&self, x: &Element) -> i128 {
        x.terms.iter().map(|(m, c)| c * self.q_expansion(m).coeff).sum()
    }

    /// ψ^k scalar on a basis monomial: k^{d/2} on free classes, 1 on torsion.
    pub fn psi_scalar(&self, k: i128, m: &Mono) -> i128 {
        if m.is_torsion() {
            return 1;
        }
        let mut r: i128 = 1;
        for _ in 0..m.half_degree() {
            r = crate::graded::reduce(r * k);
        }
        r
    }

    /// Every basis monomial up to `max_degree`.
    pub fn basis_upto(&self, max: i64) -> Vec<Mono> {
        (0..=max.min(self.max_degree))
            .flat_map(|d| {
                let mut v = self.free_basis(d);
                v.extend(self.torsion_basis(d).into_iter().map(|s| s.mono));
                v
            })
            .collect()
    }
}

/// Build the table and audit it against the bundled mod-3 fixture.
pub fn load_tmf(max_degree: i64, data: &TmfData) -> Result<TmfTable> {
    let table = TmfTable::build(max_degree.max(crate::fixtures::FIG_TMF_MAX + 1), data)?;
    crate::fixtures::check_tmf_mod3(&table)?;
    if max_degree >= table.max_degree {
        Ok(table)
    } else {
        TmfTable::build(max_degree, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> TmfTable {
        TmfTable::build(200, &TmfData::builtin()).unwrap()
    }

    #[test]
    fn small_degrees() {
        let t = t();
        assert_eq!(t.torsion_basis(3)[0].mono.to_string(), "α");
        assert_eq!(t.torsion_basis(3)[0].filtration, 1);
        assert_eq!(t.torsion_basis(10)[0].filtration, 2);
        assert_eq!(t.torsion_basis(27)[0].mono.to_string(), "αΔ");
        assert_eq!(t.free_basis(8), vec![Mono::free(0, 1, 0, 0)]);
        assert!(t.free_basis(4).is_empty());
        assert!(t.free_basis(7).is_empty());
        let names: Vec<String> = t.free_basis(24).iter().map(|m| m.to_string()).collect();
        assert_eq!(names, vec!["c4³", "3Δ"]);
    }

    #[test]
    fn products() {
        let t = t();
        let a: Mono = "a".parse().unwrap();
        let ad: Mono = "a*D".parse().unwrap();
        assert_eq!(t.multiply(&a, &ad).unwrap().as_single().unwrap().0.to_string(), "β³");
        let b4: Mono = "b^4".parse().unwrap();
        let d6 = Mono::delta(6);
        assert_eq!(t.multiply(&b4, &d6).unwrap().as_single().unwrap().0.to_string(), "β⁴Δ⁶");
        assert_eq!(t.multiply(&Mono::ONE, &ad).unwrap().as_single().unwrap().0, ad);
        let c4: Mono = "c4".parse().unwrap();
        assert_eq!(t.multiply(&a, &c4).unwrap().zero_reason, Some(ZeroReason::Relation));
    }

    #[test]
    fn c6_squared() {
        let t = t();
        let c6: Mono = "c6".parse().unwrap();
        let p = t.multiply(&c6, &c6).unwrap();
        assert_eq!(p.terms.get(&"c4^3".parse().unwrap()), Some(&1));
        assert_eq!(p.terms.get(&"3*D".parse().unwrap()), Some(&-576));
    }

    #[test]
    fn q_expansion_examples() {
        let t = t();
        assert_eq!(t.q_expansion(&"c4".parse().unwrap()), KoClass { coeff: 1, u_power: 2 });
        assert_eq!(t.q_expansion(&"3*D".parse().unwrap()).coeff, 0);
        assert_eq!(t.q_expansion(&"c4*c6*D^2".parse().unwrap()).coeff, 0);
    }
}
