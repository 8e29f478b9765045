//! Greek-letter families, their detectors in π*j², the Hurewicz-image
//! catalog, product checks and the nondetection filters.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graded::Order;
use crate::j2::{J2Model, J2Product};
use crate::label::{Label, Mono};
use crate::psi::nu3_2pow_minus_1;
use crate::tmf::ZeroReason;

/// ν₃ of a positive integer.
fn nu3(mut n: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n % 3 == 0 {
        n /= 3;
        v += 1;
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// α_{i/j}; `j = 1` is written α_i.
    Alpha { i: u32, j: u32 },
    /// β_{i/j}; `j = 1` is written β_i.
    Beta { i: u32, j: u32 },
    /// x_{81+144t} = ⟨α1, α1, β_{5+9t}⟩.
    X { t: u32 },
    /// The class of degree 153 + 144k whose status is open.
    X153 { k: u32 },
}

impl Family {
    pub fn degree(&self) -> i64 {
        match *self {
            Family::Alpha { i, .. } => 4 * i as i64 - 1,
            Family::Beta { i, j } => 16 * i as i64 - 4 * j as i64 - 2,
            Family::X { t } => 81 + 144 * t as i64,
            Family::X153 { k } => 153 + 144 * k as i64,
        }
    }

    pub const A1: Family = Family::Alpha { i: 1, j: 1 };
    pub const B1: Family = Family::Beta { i: 1, j: 1 };
    pub const B63: Family = Family::Beta { i: 6, j: 3 };

    pub fn beta(i: u32) -> Family {
        Family::Beta { i, j: 1 }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Alpha { i, j: 1 } => write!(f, "α{i}"),
            Family::Alpha { i, j } => write!(f, "α{i}/{j}"),
            Family::Beta { i, j: 1 } => write!(f, "β{i}"),
            Family::Beta { i, j } => write!(f, "β{i}/{j}"),
            Family::X { t } => write!(f, "x{}", 81 + 144 * t),
            Family::X153 { k } => write!(f, "x{}", 153 + 144 * k),
        }
    }
}

/// A product word; repeated adjacent factors print as powers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Family>);

impl Word {
    pub fn degree(&self) -> i64 {
        self.0.iter().map(Family::degree).sum()
    }

    pub fn single(f: Family) -> Word {
        Word(vec![f])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SUP: [&str; 10] = ["⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"];
        let mut k = 0;
        while k < self.0.len() {
            let mut n = 1;
            while k + n < self.0.len() && self.0[k + n] == self.0[k] {
                n += 1;
            }
            write!(f, "{}", self.0[k])?;
            if n > 1 {
                for ch in n.to_string().chars() {
                    f.write_str(SUP[ch.to_digit(10).unwrap() as usize])?;
                }
            }
            k += n;
        }
        if self.0.is_empty() {
            f.write_str("1")?;
        }
        Ok(())
    }
}

fn parse_factor(tok: &str) -> Result<Family> {
    let bad = || Error::parse(format!("bad family token `{tok}`"));
    if let Some(inner) = tok.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
        let parts: Vec<Family> = inner.split(',').map(|p| parse_factor(p.trim())).collect::<Result<_>>()?;
        return toda_substitute(&parts).ok_or_else(|| Error::parse(format!("no registry fact for `{tok}`")));
    }
    let (head, rest) = tok.split_at(1);
    let (i, j) = match rest.split_once('/') {
        Some((i, j)) => (i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?),
        None => (rest.parse().map_err(|_| bad())?, 1),
    };
    match head {
        "a" => Ok(Family::Alpha { i, j }),
        "b" => Ok(Family::Beta { i, j }),
        "x" if j == 1 && i >= 81 && (i - 81) % 144 == 0 => Ok(Family::X { t: (i - 81) / 144 }),
        "x" if j == 1 && i >= 153 && (i - 153) % 144 == 0 => Ok(Family::X153 { k: (i - 153) / 144 }),
        _ => Err(bad()),
    }
}

/// ASCII words: `a1*b1^2*b6/3`, `<a1,a1,b5>*b1`.
pub fn parse_word(s: &str) -> Result<Word> {
    let mut out = Vec::new();
    for tok in s.split('*').map(str::trim).filter(|t| !t.is_empty()) {
        let (base, pow) = match tok.rsplit_once('^') {
            Some((b, p)) if !b.ends_with('>') || tok.ends_with(p) => {
                (b, p.parse::<usize>().map_err(|_| Error::parse(format!("bad power in `{tok}`")))?)
            }
            _ => (tok, 1),
        };
        let f = parse_factor(base)?;
        out.extend(std::iter::repeat(f).take(pow));
    }
    Ok(Word(out))
}

// ---------------------------------------------------------------- registry

/// Citation anchors known to the registry.
pub const ANCHORS: &[&str] = &["toda-classical", "ravenel-a3.4", "moss-massey", "tmf-anss", "filtration-2-window", "beta5-choice", "tmf-hurewicz"];

#[derive(Clone, Debug)]
pub struct TodaFact {
    pub bracket: &'static str,
    pub value: &'static str,
    pub indeterminacy: &'static str,
    pub anchor: &'static str,
}

pub fn toda_registry() -> Vec<TodaFact> {
    let facts = vec![
        TodaFact { bracket: "⟨α1,α1,α1⟩", value: "β1", indeterminacy: "zero", anchor: "toda-classical" },
        TodaFact { bracket: "⟨α1,α1,β5+9t⟩", value: "x81+144t", indeterminacy: "zero in j²", anchor: "ravenel-a3.4" },
        TodaFact { bracket: "⟨α1,α1,β1²x81⟩", value: "β2β6/3", indeterminacy: "zero in j²", anchor: "ravenel-a3.4" },
        TodaFact { bracket: "⟨β1β6/3,α1,α1⟩ in tmf", value: "±αΔ⁴", indeterminacy: "zero", anchor: "moss-massey" },
        TodaFact { bracket: "⟨β²,α,α⟩ in tmf", value: "αΔ", indeterminacy: "zero", anchor: "tmf-anss" },
    ];
    for f in &facts {
        assert!(ANCHORS.contains(&f.anchor), "unresolvable anchor {}", f.anchor);
    }
    facts
}

/// Replace a bracket of families by its registry value.
pub fn toda_substitute(parts: &[Family]) -> Option<Family> {
    match parts {
        [Family::A1, Family::A1, Family::A1] => Some(Family::B1),
        [Family::A1, Family::A1, Family::Beta { i, j: 1 }] if *i >= 5 && (i - 5) % 9 == 0 => {
            Some(Family::X { t: (i - 5) / 9 })
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Existence {
    Exists,
    DoesNotExist,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct ExistenceFlag {
    pub existence: Existence,
    pub note: Option<&'static str>,
    pub anchor: Option<&'static str>,
}

/// Existence flags on the β-catalog.
pub fn existence(f: &Family) -> ExistenceFlag {
    let flag = |existence, note, anchor| ExistenceFlag { existence, note, anchor };
    match *f {
        Family::Beta { i, j: 3 } if i % 9 == 3 => {
            flag(Existence::DoesNotExist, Some("would be zero in tmf while α1 times it is not"), Some("tmf-hurewicz"))
        }
        Family::Beta { i, j: 1 } if i % 9 == 7 => {
            flag(Existence::DoesNotExist, Some("would be zero in tmf while α1 times it is not"), Some("tmf-hurewicz"))
        }
        Family::Beta { i, j: 1 } if i % 9 == 5 => {
            flag(Existence::Exists, Some("representative chosen with α1·β = 0"), Some("beta5-choice"))
        }
        Family::Beta { i, j } if nondetection_lemma_applies(i, j) => {
            flag(Existence::Exists, Some("not detected in Adams-Novikov filtration ≤ 2"), Some("filtration-2-window"))
        }
        Family::X153 { .. } => flag(Existence::Unknown, Some("permanent-cycle status open"), None),
        _ => flag(Existence::Exists, None, None),
    }
}

/// Whether the filtration-≤2 nondetection lemma covers β_{s3^n/j}.
pub fn nondetection_lemma_applies(i: u32, j: u32) -> bool {
    let n = nu3(i as u64);
    n >= 3 && j >= 1 && j < n && ![8, 10, 14, 15].contains(&(j % 18))
}

// ---------------------------------------------------------------- detectors

/// A detector: `coeff · label` in π*j².
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Detector {
    pub label: Label,
    pub coeff: i128,
}

fn ker(m: Mono) -> Detector {
    Detector { label: Label::M(m), coeff: 1 }
}

fn bdry(m: Mono, coeff: i128) -> Detector {
    Detector { label: Label::boundary(Label::M(m)), coeff }
}

fn alpha_delta(c: u32) -> Mono {
    Mono::torsion(1, 0, c)
}

fn beta_delta(k: u32, c: u32) -> Mono {
    Mono::torsion(0, k, c)
}

/// `(a, b)` with `2a + 3b = i` and `b = i mod 2`.
fn alpha_monomial(i: u32) -> Mono {
    let b = i % 2;
    Mono::free(0, (i - 3 * b) / 2, b, 0)
}

/// Detector of a single family element, in tmf^ψ names.
pub fn detector(f: &Family) -> Option<Detector> {
    match *f {
        Family::Alpha { i: 1, j: 1 } => Some(ker(alpha_delta(0))),
        Family::Alpha { i, j } if i >= 2 => {
            let top = nu3(i as u64) + 1;
            (1..=top).contains(&j).then(|| bdry(alpha_monomial(i), 3i128.pow(top - j)))
        }
        Family::Beta { i, j: 1 } if i % 9 == 1 => Some(ker(beta_delta(1, 6 * (i / 9)))),
        Family::Beta { i, j: 1 } if i % 9 == 2 => Some(bdry(alpha_delta(1 + 6 * (i / 9)), 1)),
        Family::Beta { i, j: 1 } if i % 9 == 5 => Some(bdry(alpha_delta(3 + 6 * (i / 9)), 1)),
        Family::Beta { i, j: 3 } if i % 9 == 6 => Some(ker(beta_delta(1, 3 + 6 * (i / 9)))),
        Family::X { t } => Some(bdry(beta_delta(1, 3 + 6 * t), 1)),
        _ => None,
    }
}

/// α1 times a family that does not exist on its own.
fn compound_detector(f: &Family) -> Option<Detector> {
    let abd = |c| ker(Mono::torsion(1, 1, c));
    match *f {
        Family::Beta { i, j: 3 } if i % 9 == 3 => Some(abd(1 + 6 * (i / 9))),
        Family::Beta { i, j: 1 } if i % 9 == 7 => Some(abd(4 + 6 * (i / 9))),
        _ => None,
    }
}

/// Split a word into detectors, pairing α1 with nonexistent β factors.
fn word_detectors(w: &Word) -> Option<Vec<Detector>> {
    let mut rest = w.0.clone();
    let mut out = Vec::new();
    while let Some(pos) = rest.iter().position(|f| compound_detector(f).is_some()) {
        let f = rest.remove(pos);
        let a = rest.iter().position(|g| *g == Family::A1)?;
        rest.remove(a);
        out.push(compound_detector(&f)?);
    }
    for f in &rest {
        out.push(detector(f)?);
    }
    Some(out)
}

// ---------------------------------------------------------------- products

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductVerdict {
    NonzeroInJ2(Label),
    ZeroInJ2,
    NonzeroInTmf(Label),
    Unknown,
}

impl ProductVerdict {
    pub fn is_nonzero(&self) -> bool {
        matches!(self, ProductVerdict::NonzeroInJ2(_) | ProductVerdict::NonzeroInTmf(_))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ProductVerdict::NonzeroInJ2(_) => "nonzero-in-j2",
            ProductVerdict::ZeroInJ2 => "zero-in-j2",
            ProductVerdict::NonzeroInTmf(_) => "nonzero-in-tmf",
            ProductVerdict::Unknown => "unknown",
        }
    }
}

impl fmt::Display for ProductVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductVerdict::NonzeroInJ2(l) | ProductVerdict::NonzeroInTmf(l) => write!(f, "{}({l})", self.tag()),
            _ => f.write_str(self.tag()),
        }
    }
}

type Combo = Vec<(Label, i128)>;

fn reduce_combo(model: &J2Model, c: Combo) -> Option<Combo> {
    let mut out: Combo = Vec::new();
    for (l, k) in c {
        let l = model.j2_label(l)?;
        let s = model.group.find(&l)?;
        let k = match s.order {
            Order::Free => k,
            o => k.rem_euclid(o.modulus()),
        };
        if let Some(slot) = out.iter_mut().find(|(m, _)| *m == l) {
            slot.1 = match s.order {
                Order::Free => slot.1 + k,
                o => (slot.1 + k).rem_euclid(o.modulus()),
            };
        } else {
            out.push((l, k));
        }
    }
    out.retain(|(_, k)| *k != 0);
    Some(out)
}

/// Multiply detectors in π*j². `None` means unknown.
fn multiply_detectors(model: &J2Model, dets: &[Detector]) -> Result<Option<Combo>> {
    let Some(first) = dets.first() else {
        return Ok(Some(vec![(Label::M(Mono::ONE), 1)]));
    };
    let Some(mut acc) = reduce_combo(model, vec![(first.label.clone(), first.coeff)]) else { return Ok(None) };
    for d in &dets[1..] {
        let mut next: Combo = Vec::new();
        for (l, k) in &acc {
            match model.multiply_j2(l, &d.label)? {
                J2Product::Unknown => return Ok(None),
                J2Product::Zero => {}
                J2Product::Class(v) => next.extend(v.into_iter().map(|(m, c)| (m, c * k * d.coeff))),
            }
        }
        let Some(r) = reduce_combo(model, next) else { return Ok(None) };
        acc = r;
        if acc.is_empty() {
            break;
        }
    }
    Ok(Some(acc))
}

fn is_boundary(l: &Label) -> bool {
    matches!(l, Label::D(crate::label::Deco::Boundary, _))
}

pub fn check_product(model: &J2Model, w: &Word) -> Result<ProductVerdict> {
    let Some(dets) = word_detectors(w) else { return Ok(ProductVerdict::Unknown) };
    let Some(r) = multiply_detectors(model, &dets)? else { return Ok(ProductVerdict::Unknown) };
    let tmf_only = dets.iter().all(|d| !is_boundary(&d.label));
    Ok(match r.as_slice() {
        [] => ProductVerdict::ZeroInJ2,
        [(l, _), ..] if tmf_only => ProductVerdict::NonzeroInTmf(l.clone()),
        [(l, _), ..] => ProductVerdict::NonzeroInJ2(l.clone()),
    })
}

/// One line of a product-check file: a word and the verdict it should get.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductExpectation {
    pub word: Word,
    pub source: String,
    /// A verdict tag, or `nonzero` for either nonzero tag.
    pub expected: String,
}

impl ProductExpectation {
    pub fn accepts(&self, v: &ProductVerdict) -> bool {
        self.expected == v.tag() || (self.expected == "nonzero" && v.is_nonzero())
    }
}

const TAGS: &[&str] = &["nonzero-in-j2", "zero-in-j2", "nonzero-in-tmf", "unknown", "nonzero"];

/// Parse a product-check file. Blank lines and `#` comments are skipped;
/// every other line is `WORD VERDICT`.
pub fn parse_product_file(text: &str) -> Result<Vec<ProductExpectation>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(w), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::parse(format!("line {}: expected `WORD VERDICT`", n + 1)));
        };
        if !TAGS.contains(&v) {
            return Err(Error::parse(format!("line {}: unknown verdict `{v}`", n + 1)));
        }
        let word = parse_word(w).map_err(|e| Error::parse(format!("line {}: {e}", n + 1)))?;
        out.push(ProductExpectation { word, source: w.to_string(), expected: v.to_string() });
    }
    Ok(out)
}

// ---------------------------------------------------------------- Hurewicz image

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    DetectedBy { label: Label, coeff: i128 },
    NotDetected,
    Unknown,
}

#[derive(Clone, Debug)]
pub struct DetectionRecord {
    pub element: Word,
    pub degree: i64,
    pub verdict: Verdict,
    pub filtration: Option<u32>,
    /// The π*j² class a record without a word refers to.
    pub class: Option<Label>,
    /// Which catalog list produced the record.
    pub source: &'static str,
}

impl DetectionRecord {
    pub fn is_detected(&self) -> bool {
        matches!(self.verdict, Verdict::DetectedBy { .. })
    }
}

/// Divided α-family element α_{i/j}.
pub fn alpha_family(model: &J2Model, i: u32, j: u32) -> Result<DetectionRecord> {
    let top = nu3(i as u64) + 1;
    if i == 0 || j == 0 || j > top {
        return Err(Error::Check(format!("α{i}/{j}: j must lie in 1..={top}")));
    }
    record(model, Word::single(Family::Alpha { i, j }), "alpha-family")
}

fn record(model: &J2Model, w: Word, source: &'static str) -> Result<DetectionRecord> {
    let degree = w.degree();
    let verdict = match word_detectors(&w) {
        None => Verdict::Unknown,
        Some(dets) => match multiply_detectors(model, &dets)? {
            None => Verdict::Unknown,
            Some(c) if c.is_empty() => Verdict::NotDetected,
            Some(c) => Verdict::DetectedBy { label: c[0].0.clone(), coeff: c[0].1 },
        },
    };
    let filtration = match &verdict {
        Verdict::DetectedBy { label, .. } => model.group.find(label).map(|s| s.filtration),
        _ => None,
    };
    Ok(DetectionRecord { element: w, degree, verdict, filtration, class: None, source })
}

/// Elements of the three Theorem-A displays with degree ≤ `max_degree`.
pub fn theorem_a_elements(max_degree: i64) -> Vec<(Word, &'static str)> {
    use Family as F;
    let mut out: Vec<(Word, &'static str)> = Vec::new();
    let mut push = |v: Vec<Family>, src: &'static str| {
        let w = Word(v);
        if w.degree() <= max_degree {
            out.push((w, src));
        }
    };
    let pw = |f: Family, n: u32| std::iter::repeat(f).take(n as usize);
    for a in 1..=((max_degree + 1) / 4) as u32 {
        push(vec![F::Alpha { i: a, j: nu3(a as u64) + 1 }], "display-1");
    }
    let tmax = (max_degree / 144 + 1) as u32;
    // αβ² = 0 in tmf, so α1 and β1 do not occur together in the first display.
    let il = [(0, 0), (0, 1), (0, 2), (1, 0)];
    for t in 0..=tmax {
        for &(i, l) in &il {
            let mut v: Vec<Family> = pw(F::A1, i).chain(pw(F::B1, l)).collect();
            v.push(F::beta(1 + 9 * t));
            if v != [F::B1] {
                push(v.clone(), "display-1");
            }
            let mut v: Vec<Family> = pw(F::A1, i).chain(pw(F::B1, l)).collect();
            v.push(F::Beta { i: 6 + 9 * t, j: 3 });
            push(v, "display-1");
        }
        push(vec![F::A1, F::Beta { i: 3 + 9 * t, j: 3 }], "display-1");
        push(vec![F::A1, F::beta(7 + 9 * t)], "display-1");
        for i in 0..=1 {
            for j in 0..=1 {
                push(pw(F::A1, i).chain(pw(F::B1, j)).chain([F::beta(2 + 9 * t)]).collect(), "display-2");
            }
            push(pw(F::A1, i).chain([F::B63, F::beta(2 + 9 * t)]).collect(), "display-2");
        }
        for j in 0..=1 {
            push(pw(F::B1, j).chain([F::beta(5 + 9 * t)]).collect(), "display-2");
        }
        push(vec![F::B63, F::beta(5 + 9 * t)], "display-2");
        for i in 0..=1 {
            push(pw(F::B63, i).chain([F::X { t }]).collect(), "display-3");
        }
    }
    push(vec![F::B1], "display-2");
    push(vec![F::B1, F::B1], "display-2");
    out.sort_by_key(|(w, _)| (w.degree(), w.clone()));
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

fn in_nondetection_window(d: i64) -> bool {
    matches!(d.rem_euclid(144), 2 | 98)
}

/// Theorem-A records, the extra low-degree products, and the nondetection
/// and unknown records.
pub fn hurewicz_image(model: &J2Model, max_degree: i64) -> Result<Vec<DetectionRecord>> {
    let max_degree = max_degree.min(model.max_degree);
    let mut out = Vec::new();
    for (w, src) in theorem_a_elements(max_degree) {
        let r = record(model, w, src)?;
        if !r.is_detected() {
            return Err(Error::FixtureMismatch {
                name: "theorem A".into(),
                diff: format!("{} in degree {} is not detected: {:?}", r.element, r.degree, r.verdict),
            });
        }
        out.push(r);
    }
    let x81 = Family::X { t: 0 };
    let mut extras: Vec<Word> = (1..=3).map(|k| Word([vec![Family::B1; k], vec![x81.clone()]].concat())).collect();
    extras.push(Word(vec![Family::A1, x81]));
    for w in extras.into_iter().filter(|w| w.degree() <= max_degree) {
        out.push(record(model, w, "low-products")?);
    }
    let a1b1b1 = Word(vec![Family::A1, Family::B1, Family::B1]);
    if a1b1b1.degree() <= max_degree {
        let r = record(model, a1b1b1, "nondetection")?;
        out.push(DetectionRecord { verdict: Verdict::NotDetected, filtration: None, ..r });
    }
    // Nonzero classes in degrees 2, 98 mod 144 are outside the image.
    for d in (0..=max_degree).filter(|d| in_nondetection_window(*d)) {
        for s in model.group.get(d) {
            out.push(DetectionRecord {
                element: Word(vec![]),
                degree: d,
                verdict: Verdict::NotDetected,
                filtration: Some(s.filtration),
                class: Some(s.label.clone()),
                source: "nondetection-2-98",
            });
        }
    }
    // Filtration-1 classes off the q-expansion are not detected.
    for s in model.group.iter().filter(|s| s.degree <= max_degree && s.filtration == 1) {
        if let Some(m) = s.label.strip(crate::label::Deco::Boundary).and_then(Label::mono) {
            if m.is_free() && model.table.q_expansion(m).coeff == 0 {
                out.push(DetectionRecord {
                    element: Word(vec![]),
                    degree: s.degree,
                    verdict: Verdict::NotDetected,
                    filtration: Some(1),
                    class: Some(s.label.clone()),
                    source: "nondetection-1-line",
                });
            }
        }
    }
    for k in 0.. {
        let f = Family::X153 { k };
        if f.degree() > max_degree {
            break;
        }
        let class = Label::boundary(Label::M(beta_delta(1, 6 + 6 * k)));
        let filtration = model.group.find(&class).map(|s| s.filtration);
        out.push(DetectionRecord {
            element: Word::single(f.clone()),
            degree: f.degree(),
            verdict: Verdict::Unknown,
            filtration,
            class: Some(class),
            source: "open-153",
        });
    }
    Ok(out)
}

/// Labels detected by some record, for chart colouring.
pub fn detected_labels(records: &[DetectionRecord]) -> BTreeSet<Label> {
    records
        .iter()
        .filter_map(|r| match &r.verdict {
            Verdict::DetectedBy { label, .. } => Some(label.clone()),
            _ => None,
        })
        .collect()
}

/// Detected records in degrees 2, 98 mod 144 that Theorem A does not license.
pub fn unlicensed_detections(records: &[DetectionRecord], max_degree: i64) -> Vec<DetectionRecord> {
    let licensed: BTreeSet<Word> = theorem_a_elements(max_degree).into_iter().map(|(w, _)| w).collect();
    records
        .iter()
        .filter(|r| in_nondetection_window(r.degree) && r.is_detected() && !licensed.contains(&r.element))
        .cloned()
        .collect()
}

// ---------------------------------------------------------------- Theorem B

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BVerdict {
    Product(ProductVerdict),
    /// Zero in j², but a bracket built from it would put a non-Hurewicz class
    /// in the Hurewicz image.
    NonzeroBySphereBracket { bracket_class: Label, degree: i64 },
    Fails(String),
}

impl BVerdict {
    pub fn is_nonzero(&self) -> bool {
        match self {
            BVerdict::Product(p) => p.is_nonzero(),
            BVerdict::NonzeroBySphereBracket { .. } => true,
            BVerdict::Fails(_) => false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BRecord {
    pub word: Word,
    pub display: &'static str,
    pub degree: i64,
    pub verdict: BVerdict,
}

/// Multisets of `n` factors from F1 ∪ F6 with total degree ≤ `budget`.
fn f16_products(n: usize, budget: i64) -> Vec<Vec<Family>> {
    let mut pool = Vec::new();
    for t in 0..=(budget / 144 + 1) as u32 {
        for f in [Family::beta(1 + 9 * t), Family::Beta { i: 6 + 9 * t, j: 3 }] {
            if f.degree() <= budget {
                pool.push(f);
            }
        }
    }
    pool.sort();
    fn rec(pool: &[Family], start: usize, n: usize, budget: i64, cur: &mut Vec<Family>, out: &mut Vec<Vec<Family>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in start..pool.len() {
            let d = pool[k].degree();
            if d <= budget {
                cur.push(pool[k].clone());
                rec(pool, k, n - 1, budget - d, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&pool, 0, n, budget, &mut Vec::new(), &mut out);
    out
}

pub fn theorem_b_words(max_degree: i64) -> Vec<(Word, &'static str)> {
    use Family as F;
    let mut out: Vec<(Word, &'static str)> = Vec::new();
    let tmax = (max_degree / 144 + 1) as u32;
    for v in f16_products(4, max_degree) {
        out.push((Word(v), "four-fold"));
    }
    for s in 0..=tmax {
        out.push((Word(vec![F::A1, F::A1, F::Beta { i: 3 + 9 * s, j: 3 }]), "alpha-squared"));
        out.push((Word(vec![F::A1, F::A1, F::beta(7 + 9 * s)]), "alpha-squared"));
        for t in 0..=tmax {
            out.push((Word(vec![F::A1, F::beta(1 + 9 * s), F::beta(2 + 9 * t)]), "j2-pairs"));
            out.push((Word(vec![F::A1, F::Beta { i: 6 + 9 * s, j: 3 }, F::beta(2 + 9 * t)]), "j2-pairs"));
            out.push((Word(vec![F::beta(1 + 9 * s), F::beta(5 + 9 * t)]), "j2-pairs"));
            out.push((Word(vec![F::Beta { i: 6 + 9 * s, j: 3 }, F::beta(5 + 9 * t)]), "j2-pairs"));
            out.push((Word(vec![F::A1, F::beta(1 + 9 * s), F::Beta { i: 6 + 9 * t, j: 3 }]), "tmf-bracket"));
            for w in 0..=tmax {
                out.push((Word(vec![F::beta(1 + 9 * s), F::beta(1 + 9 * t), F::beta(5 + 9 * w)]), "j2-bracket"));
                out.push((
                    Word(vec![F::Beta { i: 6 + 9 * s, j: 3 }, F::Beta { i: 6 + 9 * t, j: 3 }, F::beta(5 + 9 * w)]),
                    "j2-bracket",
                ));
            }
        }
    }
    for w in 0..=tmax {
        let x = F::X { t: w };
        out.push((Word(vec![F::A1, x.clone()]), "bracket-x"));
        for v in f16_products(3, max_degree - x.degree()) {
            out.push((Word([vec![x.clone()], v].concat()), "bracket-x"));
        }
    }
    out.retain(|(w, _)| w.degree() <= max_degree);
    // s ↔ t symmetric families are listed once.
    let mut seen = BTreeSet::new();
    out.retain(|(w, _)| {
        let mut k = w.0.clone();
        k.sort();
        seen.insert(k)
    });
    out
}

/// Is a tmf class a Ker-detector of some Theorem-A element?
fn in_tmf_hurewicz(m: &Mono, max_degree: i64) -> bool {
    theorem_a_elements(max_degree.max(m.degree()))
        .iter()
        .filter_map(|(w, _)| word_detectors(w))
        .filter(|d| d.len() == 1)
        .any(|d| d[0].label == Label::M(*m))
        || *m == Mono::ONE
}

fn tmf_bracket_argument(model: &J2Model, w: &Word) -> Result<BVerdict> {
    // α1·β_{1+9s}·β_{6+9t/3}: bracket ⟨β_{1+9s}β_{6+9t/3}, α1, α1⟩ in tmf.
    let t = model.table.as_ref();
    let (s_, t_) = match &w.0[..] {
        [_, Family::Beta { i: a, j: 1 }, Family::Beta { i: b, j: 3 }] => (a / 9, b / 9),
        _ => return Ok(BVerdict::Fails("shape".into())),
    };
    let n = s_ + t_;
    let a = beta_delta(2, 3 + 6 * n);
    let value = alpha_delta(4 + 6 * n);
    let deg = a.degree() + 7;
    if value.degree() != deg {
        return Ok(BVerdict::Fails(format!("bracket degree {deg} vs {}", value.degree())));
    }
    if deg > t.max_degree || !t.is_basis(&value) {
        return Ok(BVerdict::Fails(format!("{value} is not a class of tmf")));
    }
    if in_tmf_hurewicz(&value, model.max_degree) {
        return Ok(BVerdict::Fails(format!("{value} lies in the tmf Hurewicz image")));
    }
    // Indeterminacy a·π7 + π_{|a|+4}·α.
    let alpha = alpha_delta(0);
    let mut indet = Vec::new();
    for m in t.free_basis(7).into_iter().chain(t.torsion_basis(7).into_iter().map(|s| s.mono)) {
        indet.push(t.multiply(&a, &m)?);
    }
    let d2 = a.degree() + 4;
    for m in t.free_basis(d2).into_iter().chain(t.torsion_basis(d2).into_iter().map(|s| s.mono)) {
        indet.push(t.multiply(&m, &alpha)?);
    }
    if indet.iter().any(|e| !e.is_zero() || e.zero_reason == Some(ZeroReason::TableDefault)) {
        return Ok(BVerdict::Fails("nonzero indeterminacy".into()));
    }
    Ok(BVerdict::NonzeroBySphereBracket { bracket_class: Label::M(value), degree: deg })
}

fn j2_bracket_argument(model: &J2Model, w: &Word) -> Result<BVerdict> {
    // ⟨β β', β_{5+9w}, α1⟩ lands in degree 98 mod 144.
    let d = w.degree() + 4;
    if d.rem_euclid(144) != 98 {
        return Ok(BVerdict::Fails(format!("bracket degree {d} is not 98 mod 144")));
    }
    if d > model.max_degree {
        return Err(Error::DegreeOutOfRange { degree: d, max: model.max_degree });
    }
    let target = model.group.get(d);
    let Some(class) = target.first() else {
        return Ok(BVerdict::Fails(format!("π{d} j² = 0")));
    };
    let (ab, b5) = (&w.0[..2], &w.0[2]);
    let ab_deg: i64 = ab.iter().map(Family::degree).sum();
    let g1 = b5.degree() + 3 + 1;
    let g2 = ab_deg + b5.degree() + 1;
    if !model.group.get(g1).is_empty() {
        return Ok(BVerdict::Fails(format!("π{g1} j² ≠ 0")));
    }
    let a1 = Label::Sphere("a1".into());
    for s in model.group.get(g2) {
        if model.multiply_j2(&s.label, &a1)? != J2Product::Zero {
            return Ok(BVerdict::Fails(format!("{} is not α1-torsion", s.label)));
        }
    }
    Ok(BVerdict::NonzeroBySphereBracket { bracket_class: class.label.clone(), degree: d })
}

pub fn theorem_b(model: &J2Model, max_degree: i64) -> Result<Vec<BRecord>> {
    let mut out = Vec::new();
    for (word, display) in theorem_b_words(max_degree) {
        let p = check_product(model, &word)?;
        let verdict = match (display, &p) {
            (_, p) if p.is_nonzero() => BVerdict::Product(p.clone()),
            ("tmf-bracket", ProductVerdict::ZeroInJ2) => tmf_bracket_argument(model, &word)?,
            ("j2-bracket", ProductVerdict::ZeroInJ2) => j2_bracket_argument(model, &word)?,
            _ => BVerdict::Product(p),
        };
        out.push(BRecord { degree: word.degree(), word, display, verdict });
    }
    Ok(out)
}

// ---------------------------------------------------------------- periodicity

/// Check detector(t+1) = Δ⁶ · detector(t) for each periodic Theorem-A family.
pub fn periodicity_check(t_max: u32) -> Vec<String> {
    type Gen = fn(u32) -> Word;
    let fams: [(&str, Gen); 6] = [
        ("β1+9t", |t| Word::single(Family::beta(1 + 9 * t))),
        ("β2+9t", |t| Word::single(Family::beta(2 + 9 * t))),
        ("β5+9t", |t| Word::single(Family::beta(5 + 9 * t))),
        ("β6+9t/3", |t| Word::single(Family::Beta { i: 6 + 9 * t, j: 3 })),
        ("α1β3+9t/3", |t| Word(vec![Family::A1, Family::Beta { i: 3 + 9 * t, j: 3 }])),
        ("α1β7+9t", |t| Word(vec![Family::A1, Family::beta(7 + 9 * t)])),
    ];
    let shift = |d: &Detector| -> Detector {
        fn go(l: &Label) -> Label {
            match l {
                Label::M(m) => Label::M(m.with_c(m.c + 6)),
                Label::D(k, inner) => Label::deco(*k, go(inner)),
                other => other.clone(),
            }
        }
        Detector { label: go(&d.label), coeff: d.coeff }
    };
    let mut bad = Vec::new();
    for (name, g) in fams {
        for t in 0..t_max {
            let (a, b) = (word_detectors(&g(t)), word_detectors(&g(t + 1)));
            match (a, b) {
                (Some(a), Some(b)) if a.len() == 1 && b.len() == 1 && shift(&a[0]) == b[0] => {}
                (a, b) => bad.push(format!("{name} t={t}: {a:?} vs {b:?}")),
            }
        }
    }
    bad
}

/// ν₃ of the order of the cokernel class detecting α_{i/j}.
pub fn alpha_order_exponent(i: u32) -> u32 {
    nu3_2pow_minus_1(4 * i as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        assert_eq!(Family::B1.degree(), 10);
        assert_eq!(Family::B63.degree(), 82);
        assert_eq!(Family::beta(5).degree(), 74);
        assert_eq!(Family::X { t: 0 }.degree(), 81);
        assert_eq!(Family::Alpha { i: 3, j: 2 }.degree(), 11);
    }

    #[test]
    fn words() {
        let w = parse_word("a1*b1^2*b6/3").unwrap();
        assert_eq!(w.to_string(), "α1β1²β6/3");
        assert_eq!(parse_word("<a1,a1,b14>").unwrap(), Word::single(Family::X { t: 1 }));
        assert_eq!(parse_word("<a1,a1,a1>").unwrap(), Word::single(Family::B1));
    }

    #[test]
    fn product_file() {
        let f = parse_product_file("# header\nb1*b1*b5 zero-in-j2\n\na1*b1*b2  nonzero # inline\n").unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[1].expected, "nonzero");
        assert!(f[1].accepts(&ProductVerdict::NonzeroInJ2(Label::M(Mono::ONE))));
        assert!(parse_product_file("b1 maybe").is_err());
        assert!(parse_product_file("b1").is_err());
    }

    #[test]
    fn flags() {
        assert_eq!(existence(&Family::beta(7)).existence, Existence::DoesNotExist);
        assert_eq!(existence(&Family::Beta { i: 3, j: 3 }).existence, Existence::DoesNotExist);
        assert_eq!(existence(&Family::beta(5)).existence, Existence::Exists);
        assert!(existence(&Family::beta(5)).note.is_some());
        assert_eq!(existence(&Family::B1).existence, Existence::Exists);
        for f in toda_registry() {
            assert!(ANCHORS.contains(&f.anchor));
        }
    }

    #[test]
    fn periodic_detectors() {
        assert!(periodicity_check(6).is_empty());
    }
}
