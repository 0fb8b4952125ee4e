//! Construction of query families, chiefly all marginals up to a given degree.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{DataPoint, QueryFamily, Schema, TestFunction};
use crate::error::{Error, Result};

/// Which flavour of marginal query to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MarginalKind {
    /// Conjunctions `Π_{i∈S} x(i)`; `binom(p, ≤d)` functions including the constant.
    #[default]
    Monotone,
    /// Indicators `1{x(i) = v_i ∀ i∈S}` over all value assignments, plus the constant.
    Assignment,
}

impl FromStr for MarginalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monotone" => Ok(MarginalKind::Monotone),
            "assignment" => Ok(MarginalKind::Assignment),
            other => Err(Error::param(format!("unknown marginal kind {other:?}"))),
        }
    }
}

impl fmt::Display for MarginalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarginalKind::Monotone => "monotone",
            MarginalKind::Assignment => "assignment",
        })
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // rightmost slot that can still advance
        let Some(i) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// All value vectors for the given arities, lexicographic.
fn assignments(arities: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(arities.len())];
    for &a in arities {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..a).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

fn marginal_functions(schema: &Schema, d: usize, kind: MarginalKind) -> Result<Vec<TestFunction>> {
    let p = schema.dimension();
    if d > p {
        return Err(Error::param(format!("degree d = {d} exceeds dimension p = {p}")));
    }
    if kind == MarginalKind::Monotone && !schema.is_boolean() {
        return Err(Error::SchemaMismatch(
            "monotone marginals require a Boolean schema".into(),
        ));
    }
    let mut functions = vec![TestFunction::Constant];
    for size in 1..=d {
        for coords in subsets(p, size) {
            match kind {
                MarginalKind::Monotone => functions.push(TestFunction::monotone(coords)),
                MarginalKind::Assignment => {
                    let arities: Vec<u32> = coords.iter().map(|&c| schema.arities()[c]).collect();
                    for values in assignments(&arities) {
                        functions.push(TestFunction::Assignment {
                            coords: coords.clone(),
                            values,
                        });
                    }
                }
            }
        }
    }
    Ok(functions)
}

/// All marginals of degree at most `d` on an arbitrary schema, ordered by degree, then
/// coordinate set, then value assignment. The constant function comes first.
pub fn marginal_family_on(schema: &Schema, d: usize, kind: MarginalKind) -> Result<QueryFamily> {
    QueryFamily::new(schema.clone(), marginal_functions(schema, d, kind)?)
}

/// All marginals of degree at most `d` on the Boolean cube `{0,1}^p`.
pub fn marginal_family(p: usize, d: usize, kind: MarginalKind) -> Result<QueryFamily> {
    marginal_family_on(&Schema::boolean(p), d, kind)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// The exact count `Σ_{j≤d} binom(p, j)` and the bound `(e·p/d)^d` on it.
pub fn family_size_bound(p: usize, d: usize) -> Result<(u128, f64)> {
    if d > p {
        return Err(Error::param(format!("degree d = {d} exceeds dimension p = {p}")));
    }
    if d == 0 {
        return Ok((1, 1.0));
    }
    let exact = (0..=d).map(|j| binomial(p, j)).sum();
    let bound = (std::f64::consts::E * p as f64 / d as f64).powi(d as i32);
    Ok((exact, bound))
}

/// Domain size up to which range checks enumerate every point instead of sampling.
const RANGE_CHECK_ENUMERATE: u128 = 1 << 12;
const RANGE_CHECK_SAMPLES: usize = 4096;

/// Verifies `f(x) ∈ [-1, 1]`, exhaustively on small schemas and on a fixed random sample otherwise.
pub fn check_range(f: &TestFunction, schema: &Schema) -> Result<()> {
    f.check_schema(schema)?;
    let out_of_range = |x: &DataPoint| {
        let v = f.eval(schema, x);
        !(-1.0..=1.0).contains(&v)
    };
    let bad = match schema.domain_size() {
        Some(size) if size <= RANGE_CHECK_ENUMERATE => (0..size as usize)
            .map(|i| schema.point_at(i))
            .find(|x| out_of_range(x)),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..RANGE_CHECK_SAMPLES)
                .map(|_| {
                    DataPoint::new(
                        schema
                            .arities()
                            .iter()
                            .map(|&a| rng.gen_range(0..a))
                            .collect(),
                    )
                })
                .find(|x| out_of_range(x))
        }
    };
    match bad {
        Some(x) => Err(Error::InvalidFunction(format!(
            "{f} leaves [-1, 1] at point ({x})"
        ))),
        None => Ok(()),
    }
}

fn parse_index_list<T: FromStr>(text: &str, line: usize, what: &str) -> Result<Vec<T>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .map(|t| t.trim_matches(|c| matches!(c, '{' | '}' | '(' | ')')))
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| Error::parse(line, format!("bad {what} entry {t:?}")))
        })
        .collect()
}

fn parse_indicator(rest: &str, line: usize, schema: &Schema) -> Result<TestFunction> {
    let s_at = rest
        .find("S=")
        .ok_or_else(|| Error::parse(line, "indicator needs S=<coords>"))?;
    let v_at = rest
        .find("values=")
        .ok_or_else(|| Error::parse(line, "indicator needs values=<values>"))?;
    if v_at < s_at {
        return Err(Error::parse(line, "S= must precede values="));
    }
    let coords: Vec<usize> = parse_index_list(&rest[s_at + 2..v_at], line, "coordinate")?;
    let values: Vec<u32> = parse_index_list(&rest[v_at + 7..], line, "value")?;
    if coords.is_empty() {
        return Err(Error::parse(line, "indicator needs at least one coordinate"));
    }
    if let Some(&c) = coords.iter().find(|&&c| c == 0 || c > schema.dimension()) {
        return Err(Error::parse(
            line,
            format!("coordinate {c} outside 1..={}", schema.dimension()),
        ));
    }
    let coords = coords.into_iter().map(|c| c - 1).collect();
    TestFunction::assignment(coords, values).map_err(|e| Error::parse(line, e.to_string()))
}

/// Parses the line-oriented query-spec format against `schema`.
///
/// Directives, one per line, with `#` starting a comment:
///
/// ```text
/// marginals monotone d=2
/// indicator S=1,2,3 values=1,1,0
/// constant
/// ```
///
/// Coordinates are one-based. With `auto_constant`, the constant function is prepended
/// when no directive produced it.
pub fn parse_query_spec(text: &str, schema: &Schema, auto_constant: bool) -> Result<QueryFamily> {
    let mut functions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .unwrap_or((content, ""));
        let start = functions.len();
        match keyword {
            "marginals" => {
                let mut kind = None;
                let mut degree = None;
                for tok in rest.split_whitespace() {
                    if let Some(d) = tok.strip_prefix("d=") {
                        degree = Some(d.parse::<usize>().map_err(|_| {
                            Error::parse(line, format!("bad degree {d:?}"))
                        })?);
                    } else {
                        kind = Some(tok.parse::<MarginalKind>().map_err(|e| Error::parse(line, e.to_string()))?);
                    }
                }
                let degree = degree.ok_or_else(|| Error::parse(line, "marginals needs d=<int>"))?;
                let kind = kind.unwrap_or_default();
                functions.extend(
                    marginal_functions(schema, degree, kind)
                        .map_err(|e| Error::parse(line, e.to_string()))?,
                );
            }
            "indicator" => functions.push(parse_indicator(rest, line, schema)?),
            "constant" if rest.is_empty() => functions.push(TestFunction::Constant),
            other => {
                return Err(Error::parse(line, format!("unknown directive {other:?}")));
            }
        }
        for f in &functions[start..] {
            check_range(f, schema).map_err(|e| Error::parse(line, e.to_string()))?;
        }
    }
    let mut family = QueryFamily::new(schema.clone(), functions)?;
    if auto_constant {
        family.ensure_constant();
    }
    Ok(family)
}
