//! Generator names shared by every model.
//!
//! A [`Mono`] is a tmf monomial `3^e α^i β^k c4^a c6^b Δ^c`. A [`Label`] is a
//! monomial, a sphere generator, or a decorated label (boundary, bar, tilde).

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono {
    pub e: u32,
    pub alpha: u32,
    pub beta: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { e: 0, alpha: 0, beta: 0, a: 0, b: 0, c: 0 };

    pub fn free(e: u32, a: u32, b: u32, c: u32) -> Mono {
        Mono { e, alpha: 0, beta: 0, a, b, c }
    }

    pub fn torsion(alpha: u32, beta: u32, c: u32) -> Mono {
        Mono { e: 0, alpha, beta, a: 0, b: 0, c }
    }

    pub fn delta(c: u32) -> Mono {
        Mono::free(0, 0, 0, c)
    }

    pub fn degree(&self) -> i64 {
        8 * self.a as i64 + 12 * self.b as i64 + 24 * self.c as i64 + 3 * self.alpha as i64 + 10 * self.beta as i64
    }

    pub fn is_torsion(&self) -> bool {
        self.alpha > 0 || self.beta > 0
    }

    pub fn is_free(&self) -> bool {
        !self.is_torsion()
    }

    /// Same monomial with the 3-power stripped.
    pub fn bare(&self) -> Mono {
        Mono { e: 0, ..*self }
    }

    pub fn with_c(&self, c: u32) -> Mono {
        Mono { c, ..*self }
    }

    /// Exponent-wise product, ignoring relations.
    pub fn times(&self, o: &Mono) -> Mono {
        Mono {
            e: self.e + o.e,
            alpha: self.alpha + o.alpha,
            beta: self.beta + o.beta,
            a: self.a + o.a,
            b: self.b + o.b,
            c: self.c + o.c,
        }
    }

    /// Weight of the free part: a degree-2w free class is scaled by 2^w under ψ².
    pub fn half_degree(&self) -> i64 {
        self.degree() / 2
    }
}

fn sup(n: u32) -> String {
    const D: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    if n == 1 {
        return String::new();
    }
    n.to_string().chars().map(|ch| D[ch.to_digit(10).unwrap() as usize]).collect()
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        if self.e == 1 {
            s.push('3');
        } else if self.e > 1 {
            s.push_str(&format!("3{}", sup(self.e)));
        }
        for (sym, n) in [("α", self.alpha), ("β", self.beta), ("c4", self.a), ("c6", self.b), ("Δ", self.c)] {
            if n > 0 {
                s.push_str(sym);
                s.push_str(&sup(n));
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        f.write_str(&s)
    }
}

/// ASCII grammar used by the data file: `3*a*b^2*c4^2*c6*D^4`, or `1`.
impl FromStr for Mono {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mono, Error> {
        let mut m = Mono::ONE;
        let s = s.trim();
        if s == "1" {
            return Ok(m);
        }
        for tok in s.split('*') {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| Error::parse(format!("bad exponent in `{tok}`")))?),
                None => (tok, 1),
            };
            match base {
                "3" => m.e += exp,
                "a" => m.alpha += exp,
                "b" => m.beta += exp,
                "c4" => m.a += exp,
                "c6" => m.b += exp,
                "D" => m.c += exp,
                _ => return Err(Error::parse(format!("unknown symbol `{base}` in `{s}`"))),
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Deco {
    /// Boundary class ∂x in a fibre.
    Boundary,
    /// Image under q0 in a mod-3 quotient.
    Bar,
    /// Lift x̃ with ∂0(x̃) = x.
    Tilde,
    /// Image under q1 in a (3, v1^j) quotient.
    Bar1,
    /// Lift through ∂1 in a (3, v1^j) quotient.
    Tilde1,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    M(Mono),
    Sphere(String),
    D(Deco, Box<Label>),
}

impl Label {
    pub fn deco(d: Deco, inner: Label) -> Label {
        Label::D(d, Box::new(inner))
    }

    pub fn boundary(inner: Label) -> Label {
        Label::deco(Deco::Boundary, inner)
    }

    pub fn bar(inner: Label) -> Label {
        Label::deco(Deco::Bar, inner)
    }

    pub fn tilde(inner: Label) -> Label {
        Label::deco(Deco::Tilde, inner)
    }

    pub fn mono(&self) -> Option<&Mono> {
        match self {
            Label::M(m) => Some(m),
            _ => None,
        }
    }

    /// Strip one decoration of the given kind.
    pub fn strip(&self, d: Deco) -> Option<&Label> {
        match self {
            Label::D(k, inner) if *k == d => Some(inner),
            _ => None,
        }
    }

    /// Innermost monomial, if any.
    pub fn core_mono(&self) -> Option<&Mono> {
        match self {
            Label::M(m) => Some(m),
            Label::Sphere(_) => None,
            Label::D(_, inner) => inner.core_mono(),
        }
    }

    /// Parse the ASCII label grammar: `d(x)`, `bar(x)`, `tilde(x)`, `bar1(x)`,
    /// `tilde1(x)`, `S:name`, or a monomial.
    pub fn parse(s: &str) -> Result<Label, Error> {
        let s = s.trim();
        for (name, d) in [
            ("d(", Deco::Boundary),
            ("bar1(", Deco::Bar1),
            ("tilde1(", Deco::Tilde1),
            ("bar(", Deco::Bar),
            ("tilde(", Deco::Tilde),
        ] {
            if let Some(rest) = s.strip_prefix(name) {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::parse(format!("unbalanced label `{s}`")))?;
                return Ok(Label::deco(d, Label::parse(inner)?));
            }
        }
        if let Some(name) = s.strip_prefix("S:") {
            return Ok(Label::Sphere(name.to_string()));
        }
        Ok(Label::M(s.parse()?))
    }
}

/// Render an ASCII sphere name (`a3/2`, `b1^2`, `a1b1`) with Greek letters.
pub fn sphere_display(name: &str) -> String {
    let mut out = String::new();
    let mut chars = name.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            'a' => out.push('α'),
            'b' => out.push('β'),
            'x' => out.push('x'),
            '^' => {
                let mut n = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    n.push(*d);
                    chars.next();
                }
                out.push_str(&sup(n.parse().unwrap_or(1)));
            }
            other => out.push(other),
        }
    }
    out
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::M(m) => write!(f, "{m}"),
            Label::Sphere(s) => f.write_str(&sphere_display(s)),
            Label::D(d, inner) => {
                let name = match d {
                    Deco::Boundary => "∂",
                    Deco::Bar => "bar",
                    Deco::Tilde => "tilde",
                    Deco::Bar1 => "bar1",
                    Deco::Tilde1 => "tilde1",
                };
                write!(f, "{name}({inner})")
            }
        }
    }
}

impl From<Mono> for Label {
    fn from(m: Mono) -> Label {
        Label::M(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse() {
        let m: Mono = "a*b*D^4".parse().unwrap();
        assert_eq!(m.degree(), 109);
        assert_eq!(m.to_string(), "αβΔ⁴");
        assert_eq!("3*D".parse::<Mono>().unwrap().to_string(), "3Δ");
        assert_eq!("c4^2*c6".parse::<Mono>().unwrap().to_string(), "c4²c6");
        let l = Label::parse("tilde(d(a*D))").unwrap();
        assert_eq!(l.to_string(), "tilde(∂(αΔ))");
        assert_eq!(Label::parse("S:b1^2").unwrap().to_string(), "β1²");
        assert_eq!(Label::parse("1").unwrap().to_string(), "1");
    }
}
