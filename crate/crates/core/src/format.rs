//! Canonical text forms of expansions, covering codes and manifold codes.
//!
//! One record per line, fields separated by single spaces. Floats use the
//! shortest decimal that round-trips, so `parse(write(x)) == x` bit for
//! bit.
//!
//! ```text
//! format_version 1
//! d 2
//! alpha 1.0
//! m 1
//! n 3
//! expansion 2 3          # d, level; then one line per (k, s) in canonical order
//! 0 0 0 0 0.0625         # k_1 .. k_d s_1 .. s_d coefficient
//! ...
//! layer 0 3              # j, dictionary size
//! covering 2 1 1.0       # d, m, alpha; then one bank line per (kbar, sbar)
//! 0 0 0 0
//! ...
//! theta 1 1 2 ...        # assignments in Gamma_j(n) order
//! ```

use std::fmt::Write as _;

use crate::codec::ManifoldCode;
use crate::covering::{bank_count, CoveringCode};
use crate::error::{Error, Result};
use crate::tensor::{MultiIndex, SparseFaberExpansion, TensorFaberIndex};

pub const FORMAT_VERSION: u32 = 1;

pub fn write_expansion(e: &SparseFaberExpansion) -> String {
    let mut out = String::new();
    push_expansion(&mut out, e);
    out
}

fn push_expansion(out: &mut String, e: &SparseFaberExpansion) {
    writeln!(out, "expansion {} {}", e.dim(), e.budget_level()).unwrap();
    for (idx, c) in e.iter() {
        for k in idx.levels().as_slice() {
            write!(out, "{k} ").unwrap();
        }
        for s in idx.shifts() {
            write!(out, "{s} ").unwrap();
        }
        writeln!(out, "{c:?}").unwrap();
    }
}

pub fn write_covering(c: &CoveringCode) -> String {
    let mut out = String::new();
    push_covering(&mut out, c);
    out
}

fn push_covering(out: &mut String, c: &CoveringCode) {
    writeln!(out, "covering {} {} {:?}", c.dim(), c.level(), c.alpha()).unwrap();
    for bank in c.banks() {
        let line: Vec<String> = bank.l().iter().map(i64::to_string).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
}

pub fn write_manifold(code: &ManifoldCode) -> String {
    let mut out = String::new();
    writeln!(out, "format_version {FORMAT_VERSION}").unwrap();
    writeln!(out, "d {}", code.d()).unwrap();
    writeln!(out, "alpha {:?}", code.alpha()).unwrap();
    writeln!(out, "m {}", code.m()).unwrap();
    writeln!(out, "n {}", code.n()).unwrap();
    push_expansion(&mut out, code.lambda_r());
    for layer in code.layers() {
        writeln!(out, "layer {} {}", layer.j(), layer.dictionary().len()).unwrap();
        for c in layer.dictionary() {
            push_covering(&mut out, c);
        }
        let theta: Vec<String> = layer.theta().iter().map(u32::to_string).collect();
        writeln!(out, "theta {}", theta.join(" ")).unwrap();
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            line: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next_fields(&mut self) -> Result<Vec<&'a str>> {
        for (i, l) in self.inner.by_ref() {
            self.line = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Ok(l.split_whitespace().collect());
            }
        }
        Err(self.err("unexpected end of input"))
    }

    fn finish(&mut self) -> Result<()> {
        for (i, l) in self.inner.by_ref() {
            if !l.trim().is_empty() {
                self.line = i + 1;
                return Err(self.err("trailing content"));
            }
        }
        Ok(())
    }

    /// Reads `tag v1 v2 ...` and returns the values.
    fn tagged(&mut self, tag: &str, count: usize) -> Result<Vec<&'a str>> {
        let f = self.next_fields()?;
        if f.first() != Some(&tag) || f.len() != count + 1 {
            return Err(self.err(format!("expected `{tag}` with {count} value(s)")));
        }
        Ok(f[1..].to_vec())
    }

    fn scalar<T: std::str::FromStr>(&mut self, tag: &str) -> Result<T> {
        let v = self.tagged(tag, 1)?[0];
        self.num(v)
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad number `{s}`")))
    }
}

fn read_expansion(r: &mut Lines) -> Result<SparseFaberExpansion> {
    let h = r.tagged("expansion", 2)?;
    let d: usize = r.num(h[0])?;
    let level: u32 = r.num(h[1])?;
    if d == 0 {
        return Err(r.err("dimension must be positive"));
    }
    let mut e = SparseFaberExpansion::zeros(d, level);
    let expected: Vec<TensorFaberIndex> = e.iter().map(|(i, _)| i).collect();
    for idx in expected {
        let f = r.next_fields()?;
        if f.len() != 2 * d + 1 {
            return Err(r.err(format!("expected {} fields", 2 * d + 1)));
        }
        let k = f[..d].iter().map(|v| r.num(v)).collect::<Result<Vec<u32>>>()?;
        let s = f[d..2 * d].iter().map(|v| r.num(v)).collect::<Result<Vec<u64>>>()?;
        if k != idx.levels().as_slice() || s != idx.shifts() {
            return Err(r.err("index out of canonical order"));
        }
        let c: f64 = r.num(f[2 * d])?;
        e.set(&TensorFaberIndex::new(MultiIndex::new(k), s)?, c)?;
    }
    Ok(e)
}

fn read_covering(r: &mut Lines) -> Result<CoveringCode> {
    let h = r.tagged("covering", 3)?;
    let d: usize = r.num(h[0])?;
    let level: u32 = r.num(h[1])?;
    let alpha: f64 = r.num(h[2])?;
    if d == 0 {
        return Err(r.err("dimension must be positive"));
    }
    let banks = (0..bank_count(d, level))
        .map(|_| {
            let f = r.next_fields()?;
            f.iter().map(|v| r.num(v)).collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CoveringCode::from_banks(d, level, alpha, banks)
}

pub fn parse_expansion(text: &str) -> Result<SparseFaberExpansion> {
    let mut r = Lines::new(text);
    let e = read_expansion(&mut r)?;
    r.finish()?;
    Ok(e)
}

pub fn parse_covering(text: &str) -> Result<CoveringCode> {
    let mut r = Lines::new(text);
    let c = read_covering(&mut r)?;
    r.finish()?;
    Ok(c)
}

pub fn parse_manifold(text: &str) -> Result<ManifoldCode> {
    let mut r = Lines::new(text);
    let v: u32 = r.scalar("format_version")?;
    if v != FORMAT_VERSION {
        return Err(r.err(format!("unsupported format_version {v}")));
    }
    let d: usize = r.scalar("d")?;
    let alpha: f64 = r.scalar("alpha")?;
    let m: u32 = r.scalar("m")?;
    let n: u32 = r.scalar("n")?;
    let lambda_r = read_expansion(&mut r)?;
    let mut layers = Vec::with_capacity(d);
    for j in 0..d {
        let h = r.tagged("layer", 2)?;
        if r.num::<usize>(h[0])? != j {
            return Err(r.err(format!("expected layer {j}")));
        }
        let size: usize = r.num(h[1])?;
        let dict = (0..size).map(|_| read_covering(&mut r)).collect::<Result<Vec<_>>>()?;
        let f = r.next_fields()?;
        if f.first() != Some(&"theta") {
            return Err(r.err("expected `theta`"));
        }
        let theta = f[1..].iter().map(|v| r.num(v)).collect::<Result<Vec<u32>>>()?;
        layers.push((dict, theta));
    }
    r.finish()?;
    ManifoldCode::from_parts(d, alpha, m, n, lambda_r, layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::encode;
    use crate::covering::build_covering;
    use crate::oracle::FnOracle;
    use crate::tensor::sparse_truncate;

    fn f2() -> FnOracle<impl Fn(&[f64]) -> f64 + Sync> {
        FnOracle::new(2, |x: &[f64]| (x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1])) * (1.0 + 0.3 * x[0]).ln())
    }

    #[test]
    fn expansion_roundtrip() {
        let e = sparse_truncate(&f2(), 3, 2);
        let text = write_expansion(&e);
        assert!(text.starts_with("expansion 2 3\n0 0 0 0 "));
        let back = parse_expansion(&text).unwrap();
        assert_eq!(back, e);
        assert_eq!(write_expansion(&back), text);
    }

    #[test]
    fn covering_roundtrip() {
        let c = build_covering(&f2(), 2, 0.5).unwrap();
        let text = write_covering(&c);
        assert_eq!(parse_covering(&text).unwrap(), c);
        assert!(text.starts_with("covering 2 2 0.5\n"));
    }

    #[test]
    fn manifold_roundtrip_is_bit_exact() {
        let f = f2();
        let code = encode(&f, 1, 2, 1.0, 2).unwrap();
        let text = write_manifold(&code);
        let back = parse_manifold(&text).unwrap();
        assert_eq!(back, code);
        for i in 0..50 {
            let x = [(i as f64 * 0.618).fract(), (i as f64 * 0.414).fract()];
            assert_eq!(back.eval(&x).to_bits(), code.eval(&x).to_bits());
        }
    }

    #[test]
    fn rejects_corruption() {
        let code = encode(&f2(), 1, 1, 1.0, 2).unwrap();
        let text = write_manifold(&code);
        let bumped = text.replacen("theta 1", "theta 99", 1);
        assert!(matches!(parse_manifold(&bumped), Err(Error::CorruptCode(_))));
        let truncated: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(matches!(parse_manifold(&truncated), Err(Error::Parse { .. })));
        let versioned = text.replacen("format_version 1", "format_version 7", 1);
        assert!(matches!(parse_manifold(&versioned), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_manifold(&format!("{text}junk\n")), Err(Error::Parse { .. })));
    }
}
