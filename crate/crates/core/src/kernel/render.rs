//! Text and LaTeX rendering of canonical expressions.
//!
//! Rendering pulls the expression apart into a sign, an integer/surd
//! constant, the symbolic gcd of the numerator coefficients, the remaining
//! radical sum, and the denominator. A radical multiplying its own radicand is
//! shown as a 3/2-power. Text output is valid input for the expression parser.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::env::ParamEnv;
use super::expr::Expr;
use super::gcd::gcd_many;
use super::poly::{Monomial, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderStyle {
    /// Plain text in the parser grammar.
    Text,
    Latex,
}

/// One monomial of a radical sum.
struct Term {
    coeff: BigInt,
    mono: Monomial,
    /// Product of the numeric radicands, 1 if none.
    root: BigInt,
    /// Polynomial radicand and odd power of its square root.
    rads: Vec<(Poly, u32)>,
}

enum Body {
    /// Single term: its radicals are plain factors.
    Single(Vec<(Poly, u32)>),
    Sum(Vec<Term>),
}

struct Layout {
    negative: bool,
    cnum: BigInt,
    root: BigInt,
    cden: BigInt,
    mono: Monomial,
    poly: Option<Poly>,
    body: Body,
    den_mono: Monomial,
    den_poly: Option<Poly>,
}

struct Names {
    names: Vec<String>,
    /// Variable indices in alphabetical order of their names.
    alpha: Vec<usize>,
}

impl Names {
    fn new(env: &ParamEnv) -> Self {
        let names = env.symbol_names();
        let mut alpha: Vec<usize> = (0..names.len()).collect();
        alpha.sort_by(|&a, &b| names[a].cmp(&names[b]));
        Names { names, alpha }
    }

    // Degree first, then lexicographic in alphabetical variable order.
    fn cmp_mono(&self, a: &Monomial, b: &Monomial) -> Ordering {
        b.degree().cmp(&a.degree()).then_with(|| {
            for &v in &self.alpha {
                match b.exp(v).cmp(&a.exp(v)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }

    fn sorted_terms<'a>(&self, p: &'a Poly) -> Vec<&'a (Monomial, BigInt)> {
        let mut t: Vec<_> = p.terms().iter().collect();
        t.sort_by(|a, b| self.cmp_mono(&a.0, &b.0));
        t
    }
}

impl Expr {
    pub fn render(&self, style: RenderStyle) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let names = Names::new(self.env());
        let layout = layout(self);
        match style {
            RenderStyle::Text => text(&layout, &names),
            RenderStyle::Latex => latex(&layout, &names),
        }
    }

    pub fn to_text(&self) -> String {
        self.render(RenderStyle::Text)
    }

    pub fn to_latex(&self) -> String {
        self.render(RenderStyle::Latex)
    }
}

fn layout(e: &Expr) -> Layout {
    let env = e.env();
    let (parts, den) = e.render_parts();

    // Pull radicand factors out of each coefficient as 3/2-powers.
    let mut split = Vec::with_capacity(parts.len());
    for (set, mut c) in parts {
        let mut root = BigInt::one();
        let mut rads = Vec::new();
        for r in env.radicands(&set) {
            if r.is_constant() {
                root *= r.constant_value().expect("constant radicand");
                continue;
            }
            let mut power = 1;
            while let Some(q) = c.div_exact(&r) {
                c = q;
                power += 2;
            }
            rads.push((r, power));
        }
        // Registry order depends on history; render order must not.
        rads.sort_by(|a: &(Poly, u32), b: &(Poly, u32)| a.0.terms().cmp(b.0.terms()));
        split.push((c, root, rads));
    }

    let g = gcd_many(split.iter().map(|(c, _, _)| c));
    let gcont = g.content();
    let g1 = g.div_int(&gcont);
    let mono = g1.monomial_content();
    let g2 = g1.div_monomial(&mono);

    let mut terms = Vec::new();
    let mut single_rads = Vec::new();
    for (c, root, rads) in &split {
        let q = c.div_exact(&g).expect("gcd divides coefficient");
        for (m, k) in q.terms() {
            terms.push(Term { coeff: k.clone(), mono: m.clone(), root: root.clone(), rads: rads.clone() });
        }
        single_rads = rads.clone();
    }

    let dcont = den.content();
    let d1 = den.div_int(&dcont);
    let den_mono = d1.monomial_content();
    let d2 = d1.div_monomial(&den_mono);

    let names = Names::new(env);
    let (negative, cnum, root, mono, body) = if terms.len() == 1 {
        let t = terms.pop().expect("one term");
        (t.coeff.is_negative(), &gcont * t.coeff.abs(), t.root, mono.mul(&t.mono), Body::Single(single_rads))
    } else {
        sort_terms(&mut terms, &names);
        let negative = terms[0].coeff.is_negative();
        if negative {
            for t in terms.iter_mut() {
                t.coeff = -&t.coeff;
            }
        }
        (negative, gcont, BigInt::one(), mono, Body::Sum(terms))
    };
    // Lead each polynomial factor with a positive term in display order.
    let mut negative = negative;
    let mut lead_positive = |p: Poly| -> Option<Poly> {
        if p.is_constant() {
            return None;
        }
        let first_negative = names.sorted_terms(&p)[0].1.is_negative();
        if first_negative {
            negative = !negative;
            Some(p.neg())
        } else {
            Some(p)
        }
    };
    let poly = lead_positive(g2);
    let den_poly = lead_positive(d2);
    let common = cnum.gcd(&dcont);
    Layout {
        negative,
        cnum: &cnum / &common,
        root,
        cden: &dcont / &common,
        mono,
        poly,
        body,
        den_mono,
        den_poly,
    }
}

// Radical-free terms first, then by radical content, then monomial order.
fn sort_terms(terms: &mut [Term], names: &Names) {
    terms.sort_by(|a, b| {
        let ka = (a.rads.len(), a.root.clone());
        let kb = (b.rads.len(), b.root.clone());
        ka.cmp(&kb)
            .then_with(|| {
                let ra = a.rads.iter().map(|(p, k)| (p.terms(), k));
                ra.cmp(b.rads.iter().map(|(p, k)| (p.terms(), k)))
            })
            .then_with(|| names.cmp_mono(&a.mono, &b.mono))
    });
}

fn mono_text(m: &Monomial, names: &Names, latex: bool) -> Vec<String> {
    names
        .alpha
        .iter()
        .filter(|&&v| m.exp(v) > 0)
        .map(|&v| {
            let name = if latex { names.names[v].replace('_', "\\_") } else { names.names[v].clone() };
            match (m.exp(v), latex) {
                (1, _) => name,
                (e, false) => format!("{name}^{e}"),
                (e, true) if e < 10 => format!("{name}^{e}"),
                (e, true) => format!("{name}^{{{e}}}"),
            }
        })
        .collect()
}

fn join(pieces: &[String], latex: bool) -> String {
    if !latex {
        return pieces.join("*");
    }
    let mut out = String::new();
    for p in pieces {
        let touching_digits =
            out.ends_with(|c: char| c.is_ascii_digit()) && p.starts_with(|c: char| c.is_ascii_digit());
        if touching_digits {
            out.push_str(" \\cdot ");
        }
        out.push_str(p);
    }
    out
}

/// Polynomial as a signed sum of monomials.
fn poly_text(p: &Poly, names: &Names, latex: bool) -> String {
    let mut out = String::new();
    for (i, (m, c)) in names.sorted_terms(p).into_iter().enumerate() {
        push_signed(&mut out, i == 0, c.is_negative());
        let mut pieces = Vec::new();
        let mag = c.abs();
        if !mag.is_one() || m.is_one() {
            pieces.push(mag.to_string());
        }
        pieces.extend(mono_text(m, names, latex));
        out.push_str(&join(&pieces, latex));
    }
    out
}

fn push_signed(out: &mut String, first: bool, negative: bool) {
    match (first, negative) {
        (true, true) => out.push('-'),
        (true, false) => {}
        (false, true) => out.push('-'),
        (false, false) => out.push('+'),
    }
}

fn paren(s: &str, latex: bool) -> String {
    if latex {
        format!("\\left({s}\\right)")
    } else {
        format!("({s})")
    }
}

fn radical_text(p: &Poly, power: u32, names: &Names, latex: bool) -> String {
    let inner = poly_text(p, names, latex);
    match (power, latex) {
        (1, false) => format!("sqrt({inner})"),
        (1, true) => format!("\\sqrt{{{inner}}}"),
        (k, false) => format!("sqrt({inner})^{k}"),
        (k, true) => format!("\\left({inner}\\right)^{{{k}/2}}"),
    }
}

fn surd(root: &BigInt, latex: bool) -> String {
    if latex {
        format!("\\sqrt{{{root}}}")
    } else {
        format!("sqrt({root})")
    }
}

fn term_text(t: &Term, names: &Names, latex: bool) -> String {
    let mut pieces = Vec::new();
    let mag = t.coeff.abs();
    let bare = t.mono.is_one() && t.rads.is_empty() && t.root.is_one();
    if !mag.is_one() || bare {
        pieces.push(mag.to_string());
    }
    if !t.root.is_one() {
        pieces.push(surd(&t.root, latex));
    }
    pieces.extend(mono_text(&t.mono, names, latex));
    for (p, k) in &t.rads {
        pieces.push(radical_text(p, *k, names, latex));
    }
    join(&pieces, latex)
}

fn sum_text(terms: &[Term], names: &Names, latex: bool) -> String {
    let mut out = String::new();
    for (i, t) in terms.iter().enumerate() {
        push_signed(&mut out, i == 0, t.coeff.is_negative());
        out.push_str(&term_text(t, names, latex));
    }
    out
}

/// Symbolic numerator factors, excluding the integer and surd constant.
fn symbolic_factors(l: &Layout, names: &Names, latex: bool, lone: bool) -> Vec<String> {
    let mut f = mono_text(&l.mono, names, latex);
    let group = |s: String| if latex { format!("({s})") } else { paren(&s, false) };
    if let Some(p) = &l.poly {
        f.push(group(poly_text(p, names, latex)));
    }
    match &l.body {
        Body::Single(rads) => {
            for (p, k) in rads {
                f.push(radical_text(p, *k, names, latex));
            }
        }
        Body::Sum(terms) => {
            let s = sum_text(terms, names, latex);
            if lone && f.is_empty() {
                f.push(s);
            } else {
                f.push(group(s));
            }
        }
    }
    f
}

fn den_factors(l: &Layout, names: &Names, latex: bool, with_const: bool) -> Vec<String> {
    let mut f = Vec::new();
    if with_const && !l.cden.is_one() {
        f.push(l.cden.to_string());
    }
    f.extend(mono_text(&l.den_mono, names, latex));
    if let Some(p) = &l.den_poly {
        let s = poly_text(p, names, latex);
        if f.is_empty() && latex {
            f.push(s);
        } else {
            f.push(format!("({s})"));
        }
    }
    f
}

fn text(l: &Layout, names: &Names) -> String {
    let has_root = !l.root.is_one();
    let const_is_one = l.cnum.is_one() && !has_root;
    // A lone sum needs no parentheses only when nothing else is attached.
    let bare_sum =
        !l.negative && const_is_one && l.cden.is_one() && l.den_mono.is_one() && l.den_poly.is_none();
    let f = symbolic_factors(l, names, false, bare_sum);
    let mut out = String::new();
    if l.negative {
        out.push('-');
    }
    let grouped_const = has_root && !f.is_empty();
    if grouped_const {
        let mut c = Vec::new();
        if !l.cnum.is_one() {
            c.push(l.cnum.to_string());
        }
        c.push(surd(&l.root, false));
        let c = c.join("*");
        if l.cden.is_one() {
            out.push_str(&c);
        } else {
            out.push_str(&format!("({c}/{})", l.cden));
        }
        out.push('*');
        out.push_str(&f.join("*"));
    } else {
        let mut num = Vec::new();
        if !l.cnum.is_one() || (f.is_empty() && !has_root) {
            num.push(l.cnum.to_string());
        }
        if has_root {
            num.push(surd(&l.root, false));
        }
        num.extend(f);
        out.push_str(&num.join("*"));
    }
    let den = den_factors(l, names, false, !grouped_const);
    match den.as_slice() {
        [] => {}
        [single] if !single.contains('*') => {
            out.push('/');
            out.push_str(single);
        }
        many => {
            out.push_str("/(");
            out.push_str(&many.join("*"));
            out.push(')');
        }
    }
    out
}

fn latex(l: &Layout, names: &Names) -> String {
    let has_root = !l.root.is_one();
    let den = den_factors(l, names, true, true);
    let f = symbolic_factors(l, names, true, l.cnum.is_one() && !has_root);
    let mut num = Vec::new();
    if !l.cnum.is_one() || (f.is_empty() && !has_root) {
        num.push(l.cnum.to_string());
    }
    if has_root {
        num.push(surd(&l.root, true));
    }
    let sum_alone = f.len() == 1 && num.is_empty() && matches!(l.body, Body::Sum(_));
    num.extend(f);
    let num = join(&num, true);
    let sign = if l.negative { "-" } else { "" };
    if den.is_empty() {
        if sum_alone && l.negative {
            return format!("-({num})");
        }
        return format!("{sign}{num}");
    }
    format!("{sign}\\frac{{{num}}}{{{}}}", join(&den, true))
}
