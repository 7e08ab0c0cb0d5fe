//! Pretty-printing in the notation `T_{kl;2,1}(t0,t1) P2^{ik}(t0) [t0,t1;P2^{jl}]`.

use std::collections::HashMap;
use std::fmt::{self, Write};

use num_rational::Rational64;

use crate::contraction_ir::lower::LoweredTerm;
use crate::contraction_ir::term::{ContractionTerm, Factor, IndexVar, NcEntry};

const WORD_NAMES: [&str; 6] = ["i", "j", "a", "b", "c", "e"];
const BOUND_NAMES: [&str; 14] = ["k", "l", "m", "n", "p", "q", "r", "s", "u", "v", "w", "x", "y", "z"];

/// Letters for indices: word directions first, then the rest by first appearance.
struct Names(HashMap<IndexVar, String>);

impl Names {
    fn new(word: &[NcEntry], rest: impl Iterator<Item = IndexVar>) -> Self {
        let mut m = HashMap::new();
        let mut w = 0;
        for i in word.iter().flat_map(|e| e.dirs.iter().copied()) {
            m.entry(i).or_insert_with(|| {
                w += 1;
                WORD_NAMES.get(w - 1).map(|s| s.to_string()).unwrap_or_else(|| format!("w{w}"))
            });
        }
        let mut b = 0;
        for i in rest {
            m.entry(i).or_insert_with(|| {
                b += 1;
                BOUND_NAMES.get(b - 1).map(|s| s.to_string()).unwrap_or_else(|| format!("x{b}"))
            });
        }
        Names(m)
    }

    fn get(&self, i: IndexVar) -> &str {
        &self.0[&i]
    }
}

fn slot(s: usize) -> String {
    format!("t{s}")
}

fn factor_string(f: &Factor, names: &Names) -> String {
    let head = format!("{}^{{{}{}}}", f.func.name(), names.get(f.indices[0]), names.get(f.indices[1]));
    let mut prefix = String::new();
    let mut suffix = String::new();
    let mut args = Vec::new();
    let mut wrapped = false;
    for (start, len) in f.block_ranges() {
        if len == 1 {
            args.push(slot(f.slots[start]));
        } else {
            wrapped = true;
            let nodes: Vec<String> = f.slots[start..start + len].iter().map(|&s| slot(s)).collect();
            let _ = write!(prefix, "[{};", nodes.join(","));
            suffix.push(']');
            args.push("·".to_string());
        }
    }
    if wrapped && f.blocks.len() == 1 {
        format!("{prefix}{head}{suffix}")
    } else {
        format!("{prefix}{head}({}){suffix}", args.join(","))
    }
}

fn word_string(word: &[NcEntry], names: &Names) -> String {
    let parts: Vec<String> = word
        .iter()
        .map(|e| {
            let ds: String = e.dirs.iter().map(|&d| format!("δ_{}", names.get(d))).collect();
            format!("{ds}(h)")
        })
        .collect();
    format!("({})", parts.join("·"))
}

fn coeff_string(c: Rational64) -> String {
    let mag = if *c.denom() == 1 { c.numer().abs().to_string() } else { format!("{}/{}", c.numer().abs(), c.denom()) };
    let sign = if *c.numer() < 0 { "-" } else { "+" };
    if mag == "1" {
        sign.to_string()
    } else {
        format!("{sign}{mag} ")
    }
}

impl fmt::Display for LoweredTerm {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rest = self.factors.iter().flat_map(|f| f.indices).chain(self.tfunc.xi.iter().copied());
        let names = Names::new(&self.word, rest);
        let xi: String = self.tfunc.xi.iter().map(|&i| names.get(i)).collect();
        let support = self.tfunc.support();
        let alpha: Vec<String> = support.iter().map(|&s| self.tfunc.alpha[s].to_string()).collect();
        let slots: Vec<String> = support.iter().map(|&s| slot(s)).collect();
        write!(out, "{}T_{{{};{}}}({})", coeff_string(self.coeff), xi, alpha.join(","), slots.join(","))?;
        for f in &self.factors {
            write!(out, " {}", factor_string(f, &names))?;
        }
        if !self.word.is_empty() {
            write!(out, " {}", word_string(&self.word, &names))?;
        }
        Ok(())
    }
}

impl fmt::Display for ContractionTerm {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rest = self.factors.iter().flat_map(|f| f.indices).chain(self.xi.iter().copied());
        let names = Names::new(&self.word, rest);
        write!(out, "{}", coeff_string(self.coeff).trim_end())?;
        for &i in &self.xi {
            write!(out, " ξ_{}", names.get(i))?;
        }
        for (s, &a) in self.b0.iter().enumerate() {
            match a {
                0 => {}
                1 => write!(out, " B0({})", slot(s))?,
                _ => write!(out, " B0^{a}({})", slot(s))?,
            }
        }
        for f in &self.factors {
            write!(out, " {}", factor_string(f, &names))?;
        }
        if !self.word.is_empty() {
            write!(out, " {}", word_string(&self.word, &names))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction_ir::lower::TFunctionRef;
    use crate::contraction_ir::term::OpFunction;

    #[test]
    fn conventional_notation() {
        let iv = IndexVar;
        let mut dd = Factor::new(OpFunction::P2, iv(1), iv(3), vec![0]);
        dd.blocks = vec![2];
        dd.slots = vec![0, 1];
        let t = LoweredTerm {
            coeff: Rational64::from_integer(1),
            tfunc: TFunctionRef { xi: vec![iv(2), iv(3)], alpha: vec![2, 1] },
            factors: vec![Factor::new(OpFunction::P2, iv(0), iv(2), vec![0]), dd],
            word: vec![NcEntry::new(vec![iv(0), iv(1)])],
        };
        assert_eq!(t.to_string(), "+T_{kl;2,1}(t0,t1) P2^{ik}(t0) [t0,t1;P2^{jl}] (δ_iδ_j(h))");
        let mut p1 = Factor::new(OpFunction::P1, iv(0), iv(1), vec![0, 1]);
        p1.blocks = vec![2, 1];
        p1.slots = vec![0, 1, 2];
        let names = Names::new(&[NcEntry::new(vec![iv(0), iv(1)])], std::iter::empty());
        assert_eq!(factor_string(&p1, &names), "[t0,t1;P1^{ij}(·,t2)]");
    }
}
