//! Exact linear algebra over the 3-local integers.
//!
//! Scalars are residues modulo `3^PRECISION`. Every valuation that occurs in
//! the models is tiny compared to the precision, and any pivot that reaches it
//! is reported as an error instead of being silently truncated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::label::Label;

pub const PRIME: i128 = 3;
pub const PRECISION: u32 = 38;
pub const MODULUS: i128 = pow3(PRECISION);

pub const fn pow3(k: u32) -> i128 {
    let mut r: i128 = 1;
    let mut i = 0;
    while i < k {
        r *= 3;
        i += 1;
    }
    r
}

pub fn reduce(x: i128) -> i128 {
    x.rem_euclid(MODULUS)
}

fn mulmod(x: i128, y: i128) -> i128 {
    reduce(reduce(x) * reduce(y))
}

/// 3-adic valuation of a residue; `None` for zero modulo `3^PRECISION`.
pub fn nu3(x: i128) -> Option<u32> {
    let mut x = reduce(x);
    if x == 0 {
        return None;
    }
    let mut v = 0;
    while x % PRIME == 0 {
        x /= PRIME;
        v += 1;
    }
    Some(v)
}

fn inv_unit(u: i128) -> i128 {
    let (mut r0, mut r1) = (reduce(u), MODULUS);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "not a 3-adic unit");
    reduce(s0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    /// 3-locally free of rank one.
    Free,
    /// Cyclic of order 3^k, k ≥ 1.
    Cyclic(u32),
}

impl Order {
    pub fn exponent(&self) -> Option<u32> {
        match self {
            Order::Free => None,
            Order::Cyclic(k) => Some(*k),
        }
    }

    /// Modulus for entries landing in a summand of this order.
    pub fn modulus(&self) -> i128 {
        match self {
            Order::Free => MODULUS,
            Order::Cyclic(k) => pow3(*k),
        }
    }

    pub fn parse(s: &str) -> Result<Order> {
        if s == "free" {
            return Ok(Order::Free);
        }
        let n: i128 = s.parse().map_err(|_| Error::parse(format!("bad order `{s}`")))?;
        match nu3(n) {
            Some(k) if k >= 1 && pow3(k) == n => Ok(Order::Cyclic(k)),
            _ => Err(Error::parse(format!("order `{s}` is not a power of 3"))),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Free => f.write_str("free"),
            Order::Cyclic(k) => write!(f, "{}", pow3(*k)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Summand {
    pub label: Label,
    pub order: Order,
    pub degree: i64,
    pub filtration: u32,
}

impl Summand {
    pub fn new(label: Label, order: Order, degree: i64, filtration: u32) -> Summand {
        Summand { label, order, degree, filtration }
    }
}

/// Order of a finitely generated 3-local group: free rank and log₃ of the torsion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct GroupOrder {
    pub free_rank: usize,
    pub torsion_log3: u32,
}

impl GroupOrder {
    pub fn of(summands: &[Summand]) -> GroupOrder {
        let mut o = GroupOrder::default();
        for s in summands {
            match s.order {
                Order::Free => o.free_rank += 1,
                Order::Cyclic(k) => o.torsion_log3 += k,
            }
        }
        o
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion_log3 == 0
    }
}

impl std::ops::Mul for GroupOrder {
    type Output = GroupOrder;
    fn mul(self, o: GroupOrder) -> GroupOrder {
        GroupOrder { free_rank: self.free_rank + o.free_rank, torsion_log3: self.torsion_log3 + o.torsion_log3 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct GradedGroup {
    degrees: BTreeMap<i64, Vec<Summand>>,
    labels: BTreeSet<Label>,
    pub max_degree: i64,
}

impl GradedGroup {
    pub fn new(max_degree: i64) -> GradedGroup {
        GradedGroup { degrees: BTreeMap::new(), labels: BTreeSet::new(), max_degree }
    }

    pub fn push(&mut self, s: Summand) -> Result<()> {
        if s.degree > self.max_degree {
            return Err(Error::DegreeOutOfRange { degree: s.degree, max: self.max_degree });
        }
        if !self.labels.insert(s.label.clone()) {
            return Err(Error::InvalidGroup(format!("duplicate label {}", s.label)));
        }
        self.degrees.entry(s.degree).or_default().push(s);
        Ok(())
    }

    pub fn extend(&mut self, it: impl IntoIterator<Item = Summand>) -> Result<()> {
        for s in it {
            self.push(s)?;
        }
        Ok(())
    }

    pub fn get(&self, d: i64) -> &[Summand] {
        self.degrees.get(&d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn order(&self, d: i64) -> GroupOrder {
        GroupOrder::of(self.get(d))
    }

    /// Number of cyclic summands, i.e. the F₃-dimension of the mod-3 reduction.
    pub fn rank(&self, d: i64) -> usize {
        self.get(d).len()
    }

    pub fn find(&self, label: &Label) -> Option<&Summand> {
        if !self.labels.contains(label) {
            return None;
        }
        self.degrees.values().flatten().find(|s| &s.label == label)
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.labels.contains(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Summand> {
        self.degrees.values().flatten()
    }

    pub fn nonzero_degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.degrees.iter().filter(|(_, v)| !v.is_empty()).map(|(d, _)| *d)
    }

    /// Replace all summands in one degree.
    pub fn set_degree(&mut self, d: i64, summands: Vec<Summand>) -> Result<()> {
        if let Some(old) = self.degrees.remove(&d) {
            for s in old {
                self.labels.remove(&s.label);
            }
        }
        for s in summands {
            self.push(s)?;
        }
        Ok(())
    }
}

/// Dense integer matrix, row-major, entries reduced modulo `3^PRECISION`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i128>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, *x);
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: &[i128]) -> Matrix {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, *x);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: i128) {
        self.data[i * self.cols + j] = reduce(x);
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!("{}x{} * {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut r = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let y = o.get(k, j);
                    if y != 0 {
                        let cur = r.get(i, j);
                        r.set(i, j, cur + mulmod(x, y));
                    }
                }
            }
        }
        Ok(r)
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, o: &Matrix) -> Result<Matrix> {
        if self.rows != o.rows {
            return Err(Error::Shape("hcat row mismatch".into()));
        }
        let mut r = Matrix::zeros(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                r.set(i, j, self.get(i, j));
            }
            for j in 0..o.cols {
                r.set(i, self.cols + j, o.get(i, j));
            }
        }
        Ok(r)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[t] += f * row[s]
    fn add_row(&mut self, t: usize, s: usize, f: i128) {
        for j in 0..self.cols {
            let x = self.get(s, j);
            if x != 0 {
                let y = self.get(t, j);
                self.set(t, j, y + mulmod(f, x));
            }
        }
    }

    /// col[t] += f * col[s]
    fn add_col(&mut self, t: usize, s: usize, f: i128) {
        for i in 0..self.rows {
            let x = self.get(i, s);
            if x != 0 {
                let y = self.get(i, t);
                self.set(i, t, y + mulmod(f, x));
            }
        }
    }

    fn scale_row(&mut self, i: usize, f: i128) {
        for j in 0..self.cols {
            let x = self.get(i, j);
            self.set(i, j, mulmod(x, f));
        }
    }

    fn scale_col(&mut self, j: usize, f: i128) {
        for i in 0..self.rows {
            let x = self.get(i, j);
            self.set(i, j, mulmod(x, f));
        }
    }

    /// Determinant modulo 3 (enough to decide invertibility over Z_(3)).
    pub fn det_mod3(&self) -> i128 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j) % 3).collect()).collect();
        let mut det = 1;
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| a[i][k] != 0) else { return 0 };
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det = (det * a[k][k]).rem_euclid(3);
            let inv = a[k][k]; // 1 and 2 are self-inverse mod 3
            for i in k + 1..n {
                let f = (a[i][k] * inv).rem_euclid(3);
                for j in k..n {
                    a[i][j] = (a[i][j] - f * a[k][j]).rem_euclid(3);
                }
            }
        }
        det.rem_euclid(3)
    }
}

/// `u * m * v = diag(3^valuations)`, with `u_inv` the inverse of `u`.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Diagonal valuations, `None` where the diagonal entry is zero.
    pub valuations: Vec<Option<u32>>,
    pub u: Matrix,
    pub u_inv: Matrix,
    pub v: Matrix,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.valuations.iter().filter(|v| v.is_some()).count()
    }
}

/// Smith normal form over Z_(3). Pivots: smallest valuation, then lowest row,
/// then lowest column.
pub fn smith_normal_form(m: &Matrix) -> Result<Snf> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = Matrix::identity(rows);
    let mut u_inv = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);
    let n = rows.min(cols);
    let mut vals = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if let Some(val) = nu3(a.get(i, j)) {
                    if best.map_or(true, |(bv, _, _)| val < bv) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else {
            vals.extend(std::iter::repeat(None).take(n - k));
            break;
        };
        if val + 4 >= PRECISION {
            return Err(Error::Precision(format!("pivot valuation {val}")));
        }
        a.swap_rows(k, pi);
        u.swap_rows(k, pi);
        u_inv.swap_cols(k, pi);
        a.swap_cols(k, pj);
        v.swap_cols(k, pj);
        let p = pow3(val);
        let unit = a.get(k, k) / p;
        let uinv = inv_unit(unit);
        a.scale_row(k, uinv);
        u.scale_row(k, uinv);
        u_inv.scale_col(k, unit);
        for i in k + 1..rows {
            let x = a.get(i, k);
            if x != 0 {
                let f = x / p;
                a.add_row(i, k, -f);
                u.add_row(i, k, -f);
                u_inv.add_col(k, i, f);
            }
        }
        for j in k + 1..cols {
            let x = a.get(k, j);
            if x != 0 {
                let f = x / p;
                a.add_col(j, k, -f);
                v.add_col(j, k, -f);
            }
        }
        vals.push(Some(val));
    }
    Ok(Snf { valuations: vals, u, u_inv, v })
}

/// A generator of a kernel or cokernel, as a coordinate vector on the
/// ambient summand basis, with the index of its dominant coordinate.
#[derive(Clone, Debug)]
pub struct Generator {
    pub order: Order,
    pub vector: Vec<i128>,
    pub pivot: usize,
}

fn relation_matrix(orders: &[Order]) -> Matrix {
    let tors: Vec<(usize, u32)> =
        orders.iter().enumerate().filter_map(|(i, o)| o.exponent().map(|k| (i, k))).collect();
    let mut r = Matrix::zeros(orders.len(), tors.len());
    for (c, (i, k)) in tors.iter().enumerate() {
        r.set(*i, c, pow3(*k));
    }
    r
}

fn order_of(v: Option<u32>) -> Option<Order> {
    match v {
        None => Some(Order::Free),
        Some(0) => None,
        Some(k) => Some(Order::Cyclic(k)),
    }
}

/// Assign dominant coordinates so that distinct generators get distinct
/// pivots. Greedy by valuation; on a clash, reroute earlier generators along
/// an augmenting path.
fn assign_pivots(gens: Vec<(Order, Vec<i128>)>) -> Vec<Generator> {
    let cands: Vec<Vec<usize>> = gens
        .iter()
        .map(|(_, vector)| {
            let mut c: Vec<(u32, usize)> =
                vector.iter().enumerate().filter_map(|(i, x)| nu3(*x).map(|v| (v, i))).collect();
            c.sort();
            c.into_iter().map(|c| c.1).collect()
        })
        .collect();
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut pivot: Vec<Option<usize>> = vec![None; gens.len()];
    fn augment(
        g: usize,
        cands: &[Vec<usize>],
        owner: &mut BTreeMap<usize, usize>,
        pivot: &mut [Option<usize>],
        seen: &mut BTreeSet<usize>,
    ) -> bool {
        for &c in &cands[g] {
            if !seen.insert(c) {
                continue;
            }
            let free = match owner.get(&c).copied() {
                None => true,
                Some(h) => augment(h, cands, owner, pivot, seen),
            };
            if free {
                owner.insert(c, g);
                pivot[g] = Some(c);
                return true;
            }
        }
        false
    }
    for g in 0..gens.len() {
        if let Some(&c) = cands[g].iter().find(|c| !owner.contains_key(c)) {
            owner.insert(c, g);
            pivot[g] = Some(c);
        } else if !augment(g, &cands, &mut owner, &mut pivot, &mut BTreeSet::new()) {
            pivot[g] = cands[g].first().copied();
        }
    }
    gens.into_iter()
        .zip(pivot)
        .map(|((order, vector), p)| Generator { order, vector, pivot: p.unwrap_or(0) })
        .collect()
}

fn check_shape(f: &Matrix, source: &[Order], target: &[Order]) -> Result<()> {
    if f.rows != target.len() || f.cols != source.len() {
        return Err(Error::Shape(format!(
            "block is {}x{}, expected {}x{}",
            f.rows,
            f.cols,
            target.len(),
            source.len()
        )));
    }
    Ok(())
}

/// Cokernel of `f: ⊕ source → ⊕ target`; generators are target vectors.
pub fn cokernel_gens(f: &Matrix, source: &[Order], target: &[Order]) -> Result<Vec<Generator>> {
    check_shape(f, source, target)?;
    let m = f.hcat(&relation_matrix(target))?;
    let snf = smith_normal_form(&m)?;
    let mut gens = Vec::new();
    for i in 0..target.len() {
        let v = snf.valuations.get(i).copied().flatten();
        if let Some(order) = order_of(v) {
            gens.push((order, snf.u_inv.column(i)));
        }
    }
    Ok(assign_pivots(gens))
}

/// Kernel of `f: ⊕ source → ⊕ target`; generators are source vectors.
pub fn kernel_gens(f: &Matrix, source: &[Order], target: &[Order]) -> Result<Vec<Generator>> {
    check_shape(f, source, target)?;
    let n = source.len();
    let m = f.hcat(&relation_matrix(target))?;
    let snf = smith_normal_form(&m)?;
    let r = snf.rank();
    let k = m.cols - r;
    // Lattice {x : f x ∈ relations of target}, projected to the source coordinates.
    let mut kmat = Matrix::zeros(n, k);
    for (c, j) in (r..m.cols).enumerate() {
        for i in 0..n {
            kmat.set(i, c, snf.v.get(i, j));
        }
    }
    let s2 = smith_normal_form(&kmat)?;
    let r2 = s2.rank();
    let w: Vec<u32> = s2.valuations.iter().take(r2).map(|v| v.unwrap()).collect();
    // Express the source relations in the basis g_i = 3^{w_i} u2⁻¹ e_i.
    let sa = relation_matrix(source);
    let t_full = s2.u.mul(&sa)?;
    let mut t = Matrix::zeros(r2, sa.cols);
    for i in 0..t_full.rows {
        for j in 0..sa.cols {
            let x = t_full.get(i, j);
            if i >= r2 {
                if x != 0 {
                    return Err(Error::Precision("source relations escape the kernel lattice".into()));
                }
                continue;
            }
            let p = pow3(w[i]);
            if x % p != 0 {
                return Err(Error::Precision("non-integral kernel coordinates".into()));
            }
            t.set(i, j, x / p);
        }
    }
    let s3 = smith_normal_form(&t)?;
    let mut gens = Vec::new();
    for l in 0..r2 {
        let v = s3.valuations.get(l).copied().flatten();
        let Some(order) = order_of(v) else { continue };
        let mut vec = vec![0i128; n];
        for i in 0..r2 {
            let coef = mulmod(s3.u_inv.get(i, l), pow3(w[i]));
            if coef == 0 {
                continue;
            }
            for (row, slot) in vec.iter_mut().enumerate() {
                *slot = reduce(*slot + mulmod(coef, s2.u_inv.get(row, i)));
            }
        }
        gens.push((order, vec));
    }
    Ok(assign_pivots(gens))
}

/// Per-degree integer matrices between two graded groups.
#[derive(Clone, Debug)]
pub struct GradedMorphism {
    pub source: Arc<GradedGroup>,
    pub target: Arc<GradedGroup>,
    pub degree_shift: i64,
    blocks: BTreeMap<i64, Matrix>,
}

fn orders(s: &[Summand]) -> Vec<Order> {
    s.iter().map(|x| x.order).collect()
}

impl GradedMorphism {
    pub fn new(source: Arc<GradedGroup>, target: Arc<GradedGroup>, degree_shift: i64) -> GradedMorphism {
        GradedMorphism { source, target, degree_shift, blocks: BTreeMap::new() }
    }

    /// Install the block out of source degree `d`; entries are reduced to
    /// canonical representatives modulo the target summand orders.
    pub fn set_block(&mut self, d: i64, mut m: Matrix) -> Result<()> {
        let src = self.source.get(d);
        let tgt = self.target.get(d + self.degree_shift);
        check_shape(&m, &orders(src), &orders(tgt))?;
        for (i, t) in tgt.iter().enumerate() {
            let md = t.order.modulus();
            for j in 0..m.cols {
                let x = m.get(i, j);
                m.set(i, j, x.rem_euclid(md));
            }
        }
        self.blocks.insert(d, m);
        Ok(())
    }

    pub fn block(&self, d: i64) -> Matrix {
        let rows = self.target.get(d + self.degree_shift).len();
        let cols = self.source.get(d).len();
        self.blocks.get(&d).cloned().unwrap_or_else(|| Matrix::zeros(rows, cols))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GradedMorphism) -> Result<GradedMorphism> {
        let mut out = GradedMorphism::new(
            first.source.clone(),
            self.target.clone(),
            first.degree_shift + self.degree_shift,
        );
        for d in first.source.nonzero_degrees() {
            let mid = d + first.degree_shift;
            if self.target.get(mid + self.degree_shift).is_empty() {
                continue;
            }
            let m = self.block(mid).mul(&first.block(d))?;
            out.set_block(d, m)?;
        }
        Ok(out)
    }

    fn check_degree(&self, d: i64) -> Result<()> {
        if d > self.source.max_degree || d + self.degree_shift > self.target.max_degree {
            return Err(Error::DegreeOutOfRange { degree: d, max: self.source.max_degree });
        }
        Ok(())
    }

    pub fn kernel_gens(&self, d: i64) -> Result<Vec<Generator>> {
        self.check_degree(d)?;
        let src = self.source.get(d);
        let tgt = self.target.get(d + self.degree_shift);
        kernel_gens(&self.block(d), &orders(src), &orders(tgt))
    }

    pub fn cokernel_gens(&self, d: i64) -> Result<Vec<Generator>> {
        self.check_degree(d)?;
        let src = self.source.get(d);
        let tgt = self.target.get(d + self.degree_shift);
        cokernel_gens(&self.block(d), &orders(src), &orders(tgt))
    }
}

/// Kernel in source degree `d`, labelled by the dominant source summand.
pub fn kernel(m: &GradedMorphism, d: i64) -> Result<Vec<Summand>> {
    let src = m.source.get(d);
    Ok(m
        .kernel_gens(d)?
        .into_iter()
        .map(|g| {
            let s = &src[g.pivot];
            Summand::new(s.label.clone(), g.order, d, s.filtration)
        })
        .collect())
}

/// Cokernel of the block out of source degree `d` (living in degree
/// `d + shift`), labelled `∂(target)` with filtration raised by one.
pub fn cokernel(m: &GradedMorphism, d: i64) -> Result<Vec<Summand>> {
    let td = d + m.degree_shift;
    let tgt = m.target.get(td);
    Ok(m
        .cokernel_gens(d)?
        .into_iter()
        .map(|g| {
            let s = &tgt[g.pivot];
            Summand::new(Label::boundary(s.label.clone()), g.order, td, s.filtration + 1)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolution {
    Split,
    NonSplit(Vec<Summand>),
    Unresolved,
}

#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    /// Cokernel part (one degree up, shifted down).
    pub sub: Vec<Summand>,
    /// Kernel part.
    pub quotient: Vec<Summand>,
    pub degree: i64,
    pub resolution: Resolution,
}

impl ExtensionProblem {
    pub fn split_group(&self) -> Vec<Summand> {
        self.sub.iter().chain(&self.quotient).cloned().collect()
    }

    /// Glue the first sub summand onto the first quotient summand.
    pub fn maximal_nonsplit(&self) -> Vec<Summand> {
        let (Some(s0), Some(q0)) = (self.sub.first(), self.quotient.first()) else {
            return self.split_group();
        };
        let order = match (s0.order, q0.order) {
            (Order::Cyclic(a), Order::Cyclic(b)) => Order::Cyclic(a + b),
            _ => Order::Free,
        };
        let glued = Summand::new(q0.label.clone(), order, self.degree, q0.filtration);
        std::iter::once(glued).chain(self.sub[1..].iter().cloned()).chain(self.quotient[1..].iter().cloned()).collect()
    }
}

/// Fibre of a degree-0 self-map, one degree per `0 → coker_{d+1} → fib_d → ker_d → 0`.
#[derive(Clone, Debug)]
pub struct FiberResult {
    pub group: GradedGroup,
    pub problems: Vec<ExtensionProblem>,
}

pub fn solve_fiber_les(f: &GradedMorphism) -> Result<FiberResult> {
    if f.degree_shift != 0 {
        return Err(Error::Shape("fibre needs a degree-0 map".into()));
    }
    let max = f.source.max_degree.min(f.target.max_degree) - 1;
    let lo = f.source.nonzero_degrees().next().unwrap_or(0).min(0);
    let mut group = GradedGroup::new(max);
    let mut problems = Vec::new();
    for d in lo..=max {
        let ker = kernel(f, d)?;
        let coker: Vec<Summand> =
            cokernel(f, d + 1)?.into_iter().map(|s| Summand { degree: d, ..s }).collect();
        if !ker.is_empty() && !coker.is_empty() {
            problems.push(ExtensionProblem {
                sub: coker.clone(),
                quotient: ker.clone(),
                degree: d,
                resolution: Resolution::Unresolved,
            });
        }
        group.extend(coker)?;
        group.extend(ker)?;
    }
    Ok(FiberResult { group, problems })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleResolution {
    Split,
    NonSplit,
}

/// Resolution for every extension problem in degrees `≡ residue (mod modulus)`.
#[derive(Clone, Debug)]
pub struct ExtensionRule {
    pub modulus: i64,
    pub residue: i64,
    pub resolution: RuleResolution,
}

impl ExtensionRule {
    pub fn matches(&self, d: i64) -> bool {
        d.rem_euclid(self.modulus) == self.residue.rem_euclid(self.modulus)
    }
}

#[derive(Clone, Debug)]
pub struct PolicyOutcome {
    pub group: GradedGroup,
    pub resolved: Vec<ExtensionProblem>,
    pub warnings: Vec<String>,
}

pub fn apply_extension_policy(
    group: &GradedGroup,
    problems: &[ExtensionProblem],
    rules: &[ExtensionRule],
) -> Result<PolicyOutcome> {
    let mut out = group.clone();
    let mut resolved = Vec::new();
    let mut warnings = Vec::new();
    for p in problems {
        let hits: BTreeSet<_> = rules
            .iter()
            .filter(|r| r.matches(p.degree))
            .map(|r| matches!(r.resolution, RuleResolution::Split))
            .collect();
        if hits.len() > 1 {
            return Err(Error::RuleConflict(p.degree));
        }
        let split = match hits.first() {
            Some(s) => *s,
            None => {
                warnings.push(format!("degree {}: no extension rule, resolved as split", p.degree));
                true
            }
        };
        let mut q = p.clone();
        if split {
            q.resolution = Resolution::Split;
        } else {
            let glued = p.maximal_nonsplit();
            let rest: Vec<Summand> = out
                .get(p.degree)
                .iter()
                .filter(|s| !p.sub.contains(s) && !p.quotient.contains(s))
                .cloned()
                .collect();
            out.set_degree(p.degree, glued.iter().cloned().chain(rest).collect())?;
            q.resolution = Resolution::NonSplit(glued);
        }
        resolved.push(q);
    }
    Ok(PolicyOutcome { group: out, resolved, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vals(m: &[Vec<i128>]) -> Vec<Option<u32>> {
        smith_normal_form(&Matrix::from_rows(m).unwrap()).unwrap().valuations
    }

    #[test]
    fn snf_examples() {
        assert_eq!(vals(&[vec![3]]), vec![Some(1)]);
        assert_eq!(vals(&[vec![15]]), vec![Some(1)]);
        assert_eq!(vals(&[vec![1, 0], vec![0, 1]]), vec![Some(0), Some(0)]);
        assert_eq!(vals(&[vec![9, 3], vec![3, 0]]), vec![Some(1), Some(1)]);
    }

    #[test]
    fn snf_reconstruction() {
        let m = Matrix::from_rows(&[vec![6, 4, 9], vec![2, 18, -5], vec![27, 3, 3]]).unwrap();
        let s = smith_normal_form(&m).unwrap();
        let d = s.u.mul(&m).unwrap().mul(&s.v).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.valuations[i].map_or(0, pow3) } else { 0 };
                assert_eq!(d.get(i, j), want);
            }
        }
        assert_ne!(s.u.det_mod3(), 0);
        assert_ne!(s.v.det_mod3(), 0);
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn kernel_cokernel_small() {
        let three = Matrix::from_rows(&[vec![3]]).unwrap();
        let z9 = [Order::Cyclic(2)];
        let c = cokernel_gens(&three, &z9, &z9).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].order, Order::Cyclic(1));
        let k = kernel_gens(&three, &z9, &z9).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].order, Order::Cyclic(1));

        let fifteen = Matrix::from_rows(&[vec![15]]).unwrap();
        let z = [Order::Free];
        assert!(kernel_gens(&fifteen, &z, &z).unwrap().is_empty());
        let c = cokernel_gens(&fifteen, &z, &z).unwrap();
        assert_eq!(c[0].order, Order::Cyclic(1));

        let zero = Matrix::zeros(1, 1);
        let f3 = [Order::Cyclic(1)];
        assert_eq!(kernel_gens(&zero, &f3, &f3).unwrap()[0].order, Order::Cyclic(1));
        assert_eq!(kernel_gens(&zero, &z, &z).unwrap()[0].order, Order::Free);
    }
}
