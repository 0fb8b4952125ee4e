//! Points, datasets, test functions and the linear statistics computed from them.
//!
//! A [`Schema`] fixes the ground set: `p` categorical coordinates, each with its own
//! arity. The Boolean cube `{0,1}^p` is the schema with arity 2 everywhere. Every
//! statistic in the crate is an average `(1/n) Σ f(x_i)` of a bounded [`TestFunction`],
//! or its weighted counterpart `Σ f(z_i) h(z_i)` against a [`FiniteDensity`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest domain for which a custom lookup table may be attached to a schema.
pub const MAX_TABLE_DOMAIN: usize = 1 << 20;

/// Per-coordinate arities of a categorical ground set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schema {
    arities: Vec<u32>,
}

impl Schema {
    pub fn new(arities: Vec<u32>) -> Result<Self> {
        if let Some(pos) = arities.iter().position(|&a| a == 0) {
            return Err(Error::SchemaMismatch(format!(
                "coordinate {} has arity 0",
                pos + 1
            )));
        }
        Ok(Self { arities })
    }

    /// The Boolean cube `{0,1}^p`.
    pub fn boolean(p: usize) -> Self {
        Self {
            arities: vec![2; p],
        }
    }

    pub fn dimension(&self) -> usize {
        self.arities.len()
    }

    pub fn arities(&self) -> &[u32] {
        &self.arities
    }

    pub fn is_boolean(&self) -> bool {
        self.arities.iter().all(|&a| a == 2)
    }

    /// Number of points in the ground set, or `None` if it does not fit in a `u128`.
    pub fn domain_size(&self) -> Option<u128> {
        self.arities
            .iter()
            .try_fold(1u128, |acc, &a| acc.checked_mul(a as u128))
    }

    pub fn check_point(&self, point: &DataPoint) -> Result<()> {
        if point.dimension() != self.dimension() {
            return Err(Error::InvalidPoint(format!(
                "point has {} coordinates, schema has {}",
                point.dimension(),
                self.dimension()
            )));
        }
        for (i, (&v, &a)) in point.values().iter().zip(&self.arities).enumerate() {
            if v >= a {
                return Err(Error::InvalidPoint(format!(
                    "coordinate {} has value {v}, arity is {a}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Mixed-radix position of a conforming point; the first coordinate is most significant.
    pub fn index_of(&self, point: &DataPoint) -> usize {
        point
            .values()
            .iter()
            .zip(&self.arities)
            .fold(0usize, |acc, (&v, &a)| acc * a as usize + v as usize)
    }

    /// Inverse of [`Schema::index_of`].
    pub fn point_at(&self, mut index: usize) -> DataPoint {
        let mut values = vec![0u32; self.dimension()];
        for (slot, &a) in values.iter_mut().zip(&self.arities).rev() {
            *slot = (index % a as usize) as u32;
            index /= a as usize;
        }
        DataPoint::new(values)
    }

    /// Every point of the ground set in index order. Fails when the domain exceeds `limit`.
    pub fn enumerate(&self, limit: usize) -> Result<Dataset> {
        let size = self
            .domain_size()
            .filter(|&s| s <= limit as u128)
            .ok_or_else(|| {
                Error::param(format!("domain too large to enumerate (limit {limit})"))
            })? as usize;
        let points = (0..size).map(|i| self.point_at(i)).collect();
        Ok(Dataset {
            schema: self.clone(),
            points,
        })
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.arities)
    }
}

/// An element of the ground set: one category index per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DataPoint(Vec<u32>);

impl DataPoint {
    pub fn new(values: Vec<u32>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }
}

impl From<Vec<u32>> for DataPoint {
    fn from(values: Vec<u32>) -> Self {
        Self(values)
    }
}

impl fmt::Display for DataPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.0)
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, values: &[u32]) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

fn parse_values(text: &str, line: usize) -> Result<Vec<u32>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map_err(|_| Error::parse(line, format!("expected a category index, got {tok:?}")))
        })
        .collect()
}

/// An ordered sequence of points over a fixed schema. Repetitions are legal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    schema: Schema,
    points: Vec<DataPoint>,
}

impl Dataset {
    pub fn new(schema: Schema, points: Vec<DataPoint>) -> Result<Self> {
        for p in &points {
            schema.check_point(p)?;
        }
        Ok(Self { schema, points })
    }

    /// Convenience constructor from raw rows.
    pub fn from_rows(schema: Schema, rows: &[&[u32]]) -> Result<Self> {
        let points = rows.iter().map(|r| DataPoint::new(r.to_vec())).collect();
        Self::new(schema, points)
    }

    pub(crate) fn from_parts_unchecked(schema: Schema, points: Vec<DataPoint>) -> Self {
        Self { schema, points }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<DataPoint> {
        self.points
    }

    /// Appends `other` after `self`. Both must share a schema.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.schema != other.schema {
            return Err(Error::SchemaMismatch("cannot concatenate datasets".into()));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Ok(Dataset::from_parts_unchecked(self.schema.clone(), points))
    }

    /// Parses the text format: a line of comma-separated arities, then one point per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing arity header"))?;
        let schema = Schema::new(parse_values(header, 1)?).map_err(|e| Error::parse(1, e.to_string()))?;
        let mut points = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let point = DataPoint::new(parse_values(line, i + 1)?);
            schema
                .check_point(&point)
                .map_err(|e| Error::parse(i + 1, e.to_string()))?;
            points.push(point);
        }
        Ok(Self { schema, points })
    }
}

impl FromStr for Dataset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dataset::parse(s)
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.schema)?;
        for p in &self.points {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

/// A bounded function `Ω → [-1, 1]`. Coordinates are stored zero-based.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// The function identically equal to one.
    Constant,
    /// `Π_{i∈S} x(i)` on Boolean coordinates.
    Monotone { coords: Vec<usize> },
    /// Indicator of `x(i) = v_i` for every `i ∈ S`.
    Assignment { coords: Vec<usize>, values: Vec<u32> },
    /// Explicit values indexed by [`Schema::index_of`].
    Table { values: Vec<f64> },
}

impl TestFunction {
    pub fn monotone(coords: Vec<usize>) -> Self {
        TestFunction::Monotone { coords }
    }

    pub fn assignment(coords: Vec<usize>, values: Vec<u32>) -> Result<Self> {
        if coords.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} coordinates but {} values",
                coords.len(),
                values.len()
            )));
        }
        Ok(TestFunction::Assignment { coords, values })
    }

    /// Indicator of a single point of the schema.
    pub fn point_indicator(point: &DataPoint) -> Self {
        TestFunction::Assignment {
            coords: (0..point.dimension()).collect(),
            values: point.values().to_vec(),
        }
    }

    /// A lookup table over the whole domain of `schema`. Every value must lie in `[-1, 1]`.
    pub fn table(schema: &Schema, values: Vec<f64>) -> Result<Self> {
        let size = schema
            .domain_size()
            .filter(|&s| s <= MAX_TABLE_DOMAIN as u128)
            .ok_or_else(|| {
                Error::InvalidFunction("domain too large for an explicit table".into())
            })?;
        if values.len() as u128 != size {
            return Err(Error::InvalidFunction(format!(
                "table has {} entries, domain has {size}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::InvalidFunction(format!(
                "table value {v} outside [-1, 1]"
            )));
        }
        Ok(TestFunction::Table { values })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, TestFunction::Constant)
    }

    /// Coordinates the function depends on (empty for constants and tables).
    pub fn coords(&self) -> &[usize] {
        match self {
            TestFunction::Monotone { coords } | TestFunction::Assignment { coords, .. } => coords,
            _ => &[],
        }
    }

    pub fn check_schema(&self, schema: &Schema) -> Result<()> {
        let p = schema.dimension();
        if let Some(&c) = self.coords().iter().find(|&&c| c >= p) {
            return Err(Error::SchemaMismatch(format!(
                "coordinate {} out of range for dimension {p}",
                c + 1
            )));
        }
        match self {
            TestFunction::Constant => Ok(()),
            TestFunction::Monotone { coords } => {
                match coords.iter().find(|&&c| schema.arities()[c] != 2) {
                    Some(c) => Err(Error::SchemaMismatch(format!(
                        "monotone marginal needs Boolean coordinate {}",
                        c + 1
                    ))),
                    None => Ok(()),
                }
            }
            TestFunction::Assignment { coords, values } => {
                for (&c, &v) in coords.iter().zip(values) {
                    if v >= schema.arities()[c] {
                        return Err(Error::SchemaMismatch(format!(
                            "value {v} out of range for coordinate {}",
                            c + 1
                        )));
                    }
                }
                Ok(())
            }
            TestFunction::Table { values } => {
                if schema.domain_size() == Some(values.len() as u128) {
                    Ok(())
                } else {
                    Err(Error::SchemaMismatch("table size differs from domain".into()))
                }
            }
        }
    }

    /// Evaluates on a point that conforms to a schema this function was checked against.
    pub fn eval(&self, schema: &Schema, point: &DataPoint) -> f64 {
        let x = point.values();
        match self {
            TestFunction::Constant => 1.0,
            TestFunction::Monotone { coords } => {
                if coords.iter().all(|&c| x[c] == 1) {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::Assignment { coords, values } => {
                if coords.iter().zip(values).all(|(&c, &v)| x[c] == v) {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::Table { values } => values[schema.index_of(point)],
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Constant => f.write_str("1"),
            TestFunction::Monotone { coords } => {
                for c in coords {
                    write!(f, "x({})", c + 1)?;
                }
                Ok(())
            }
            TestFunction::Assignment { coords, values } => {
                f.write_str("1{")?;
                for (i, (c, v)) in coords.iter().zip(values).enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "x({})={v}", c + 1)?;
                }
                f.write_str("}")
            }
            TestFunction::Table { values } => write!(f, "table[{}]", values.len()),
        }
    }
}

/// An ordered family of test functions over one schema; a function's index is its position.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryFamily {
    schema: Schema,
    functions: Vec<TestFunction>,
}

impl QueryFamily {
    pub fn new(schema: Schema, functions: Vec<TestFunction>) -> Result<Self> {
        for f in &functions {
            f.check_schema(&schema)?;
        }
        Ok(Self { schema, functions })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn functions(&self) -> &[TestFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&TestFunction> {
        self.functions.get(index)
    }

    pub fn contains_constant(&self) -> bool {
        self.functions.iter().any(TestFunction::is_constant)
    }

    /// Prepends the constant-one function if the family lacks one. Returns whether it was added.
    pub fn ensure_constant(&mut self) -> bool {
        if self.contains_constant() {
            return false;
        }
        self.functions.insert(0, TestFunction::Constant);
        true
    }

    fn check_data(&self, schema: &Schema) -> Result<()> {
        if &self.schema != schema {
            return Err(Error::SchemaMismatch(format!(
                "family schema [{}] differs from data schema [{}]",
                self.schema, schema
            )));
        }
        Ok(())
    }
}

/// The vector `(⟨f, ν⟩)_{f∈F}`, indexed like the family that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticsVector(Vec<f64>);

impl StatisticsVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Sup-norm distance to another vector of the same length.
    pub fn max_abs_diff(&self, other: &StatisticsVector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// ℓ¹ distance to another vector of the same length.
    pub fn l1_diff(&self, other: &StatisticsVector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Nonnegative weights summing to one on the points of a reduced domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDensity {
    support: Dataset,
    weights: Vec<f64>,
}

impl FiniteDensity {
    pub const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(support: Dataset, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::param(format!(
                "{} weights for {} support points",
                weights.len(),
                support.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::param(format!("negative or non-finite weight {w}")));
        }
        let total = neumaier_sum(weights.iter().copied());
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::param(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { support, weights })
    }

    /// Uniform weights `1/m` on every support point.
    pub fn uniform(support: Dataset) -> Result<Self> {
        let m = support.len();
        Self::new(support, vec![1.0 / m as f64; m])
    }

    pub fn support(&self) -> &Dataset {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Neumaier's improved Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// `(1/n) Σ f(x_i)`.
pub fn evaluate_statistic(f: &TestFunction, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    f.check_schema(data.schema())?;
    Ok(mean_of(f, data))
}

fn mean_of(f: &TestFunction, data: &Dataset) -> f64 {
    let schema = data.schema();
    let total = neumaier_sum(data.points().iter().map(|x| f.eval(schema, x)));
    total / data.len() as f64
}

/// Every statistic of the family on `data`, in family order.
pub fn evaluate_all(queries: &QueryFamily, data: &Dataset) -> Result<StatisticsVector> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    queries.check_data(data.schema())?;
    let values = queries
        .functions()
        .par_iter()
        .map(|f| mean_of(f, data))
        .collect();
    Ok(StatisticsVector(values))
}

/// `Σ_i f(z_i) h(z_i)` for every function of the family.
pub fn weighted_statistics(queries: &QueryFamily, h: &FiniteDensity) -> Result<StatisticsVector> {
    queries.check_data(h.support().schema())?;
    let schema = h.support().schema();
    let values = queries
        .functions()
        .par_iter()
        .map(|f| {
            neumaier_sum(
                h.support()
                    .points()
                    .iter()
                    .zip(h.weights())
                    .map(|(z, w)| f.eval(schema, z) * w),
            )
        })
        .collect();
    Ok(StatisticsVector(values))
}

/// `max_f |⟨f, ν_Y⟩ − ⟨f, ν_X⟩|`, the additive accuracy of `synthetic` against `truth`.
pub fn accuracy_error(queries: &QueryFamily, truth: &Dataset, synthetic: &Dataset) -> Result<f64> {
    let a = evaluate_all(queries, truth)?;
    let b = evaluate_all(queries, synthetic)?;
    Ok(a.max_abs_diff(&b))
}
