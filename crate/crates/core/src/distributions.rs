//! Sampling distributions over finite categorical domains and the Rényi condition number.
//!
//! `κ(ν‖μ) = Σ_x ν(x)² / μ(x)` is the exponential of the order-2 Rényi divergence. It is
//! at least one, with equality exactly when `ν = μ`. On finite domains the Radon-Nikodym
//! derivative `dν/dμ` is the mass ratio, with `0/0` taken as `0`.

use std::collections::HashMap;
use std::fmt;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{
    neumaier_sum, CompensatedSum, DataPoint, Dataset, QueryFamily, Schema, StatisticsVector,
    TestFunction, MAX_TABLE_DOMAIN,
};
use crate::error::{Error, Result};

/// Masses must sum to one within this tolerance.
pub const MASS_TOLERANCE: f64 = 1e-12;

fn check_probabilities(probs: &[f64], what: &str) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidDistribution(format!("{what}: invalid mass {p}")));
    }
    let total = neumaier_sum(probs.iter().copied());
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "{what}: masses sum to {total}"
        )));
    }
    Ok(())
}

/// Independent coordinates, each with its own categorical law.
#[derive(Debug, Clone)]
pub struct ProductDistribution {
    schema: Schema,
    probs: Vec<Vec<f64>>,
    cdfs: Vec<Vec<f64>>,
}

impl ProductDistribution {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        for (i, coord) in probs.iter().enumerate() {
            if coord.is_empty() {
                return Err(Error::InvalidDistribution(format!(
                    "coordinate {} has no categories",
                    i + 1
                )));
            }
            check_probabilities(coord, &format!("coordinate {}", i + 1))?;
        }
        let schema = Schema::new(probs.iter().map(|c| c.len() as u32).collect())?;
        let cdfs = probs
            .iter()
            .map(|c| {
                c.iter()
                    .scan(0.0, |acc, p| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            schema,
            probs,
            cdfs,
        })
    }

    /// Uniform on every coordinate; for a Boolean schema, the uniform measure on the cube.
    pub fn uniform(schema: &Schema) -> Self {
        let probs = schema
            .arities()
            .iter()
            .map(|&a| vec![1.0 / a as f64; a as usize])
            .collect();
        Self::new(probs).expect("uniform marginals are valid")
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn coordinate_probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    fn mass(&self, x: &DataPoint) -> f64 {
        x.values()
            .iter()
            .zip(&self.probs)
            .map(|(&v, c)| c[v as usize])
            .product()
    }

    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DataPoint {
        let values = self
            .cdfs
            .iter()
            .map(|cdf| {
                let u: f64 = rng.gen();
                let last = cdf.len() - 1;
                // zero-mass categories are never selected: their cdf step is flat
                cdf.iter().position(|&c| u < c).unwrap_or(last) as u32
            })
            .collect();
        DataPoint::new(values)
    }

    fn expectation(&self, f: &TestFunction) -> Result<f64> {
        f.check_schema(&self.schema)?;
        Ok(match f {
            TestFunction::Constant => 1.0,
            TestFunction::Monotone { coords } => coords.iter().map(|&c| self.probs[c][1]).product(),
            TestFunction::Assignment { coords, values } => coords
                .iter()
                .zip(values)
                .map(|(&c, &v)| self.probs[c][v as usize])
                .product(),
            TestFunction::Table { values } => neumaier_sum(
                values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * self.mass(&self.schema.point_at(i))),
            ),
        })
    }
}

/// A distribution given by listing its support points and their masses.
#[derive(Debug, Clone)]
pub struct ExplicitDistribution {
    schema: Schema,
    points: Vec<DataPoint>,
    masses: Vec<f64>,
    index: HashMap<DataPoint, usize>,
    sampler: WeightedIndex<f64>,
}

impl ExplicitDistribution {
    pub fn new(schema: Schema, points: Vec<DataPoint>, masses: Vec<f64>) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} points but {} masses",
                points.len(),
                masses.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::InvalidDistribution("no points".into()));
        }
        check_probabilities(&masses, "explicit distribution")?;
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            schema.check_point(p)?;
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::InvalidDistribution(format!("duplicate point ({p})")));
            }
        }
        let sampler = WeightedIndex::new(&masses)
            .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
        Ok(Self {
            schema,
            points,
            masses,
            index,
            sampler,
        })
    }

    /// Uniform over every point of a schema small enough to enumerate.
    pub fn uniform(schema: &Schema) -> Result<Self> {
        let all = schema.enumerate(MAX_TABLE_DOMAIN)?;
        let m = all.len();
        Self::new(schema.clone(), all.into_points(), vec![1.0 / m as f64; m])
    }

    /// Unit mass on a single point.
    pub fn point_mass(schema: &Schema, point: DataPoint) -> Result<Self> {
        Self::new(schema.clone(), vec![point], vec![1.0])
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    fn mass(&self, x: &DataPoint) -> f64 {
        self.index.get(x).map_or(0.0, |&i| self.masses[i])
    }

    fn expectation(&self, f: &TestFunction) -> Result<f64> {
        f.check_schema(&self.schema)?;
        Ok(neumaier_sum(
            self.points
                .iter()
                .zip(&self.masses)
                .map(|(x, m)| m * f.eval(&self.schema, x)),
        ))
    }
}

/// Either kind of finite distribution, behind one sampling and mass interface.
#[derive(Debug, Clone)]
pub enum Distribution {
    Product(ProductDistribution),
    Explicit(ExplicitDistribution),
}

impl From<ProductDistribution> for Distribution {
    fn from(d: ProductDistribution) -> Self {
        Distribution::Product(d)
    }
}

impl From<ExplicitDistribution> for Distribution {
    fn from(d: ExplicitDistribution) -> Self {
        Distribution::Explicit(d)
    }
}

impl Distribution {
    pub fn schema(&self) -> &Schema {
        match self {
            Distribution::Product(d) => d.schema(),
            Distribution::Explicit(d) => d.schema(),
        }
    }

    /// `P({x})`; zero for points outside the support.
    pub fn mass(&self, x: &DataPoint) -> f64 {
        match self {
            Distribution::Product(d) => d.mass(x),
            Distribution::Explicit(d) => d.mass(x),
        }
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DataPoint {
        match self {
            Distribution::Product(d) => d.sample_point(rng),
            Distribution::Explicit(d) => d.points[d.sampler.sample(rng)].clone(),
        }
    }

    /// `count` i.i.d. draws using the caller's generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Dataset {
        let points = (0..count).map(|_| self.sample_point(rng)).collect();
        Dataset::from_parts_unchecked(self.schema().clone(), points)
    }

    /// `count` i.i.d. draws, deterministic in `seed`. Repetitions are kept.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Dataset> {
        if count == 0 {
            return Err(Error::param("sample count must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(self.sample_with(count, &mut rng))
    }

    /// The exact linear statistic `⟨f, ν⟩`.
    pub fn expectation(&self, f: &TestFunction) -> Result<f64> {
        match self {
            Distribution::Product(d) => d.expectation(f),
            Distribution::Explicit(d) => d.expectation(f),
        }
    }

    pub fn exact_statistics(&self, queries: &QueryFamily) -> Result<StatisticsVector> {
        if queries.schema() != self.schema() {
            return Err(Error::SchemaMismatch(
                "family and distribution schemas differ".into(),
            ));
        }
        let values = queries
            .functions()
            .iter()
            .map(|f| self.expectation(f))
            .collect::<Result<_>>()?;
        Ok(StatisticsVector::new(values))
    }

    /// Parses the distribution spec text format.
    ///
    /// ```text
    /// product            explicit
    /// 0.5,0.5            arities 2,2      (optional; inferred otherwise)
    /// 0.25,0.75          0,1;0.25
    ///                    1,1;0.75
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (header_line, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty distribution spec"))?;
        match header {
            "product" => {
                let mut probs = Vec::new();
                for (line, content) in lines {
                    probs.push(parse_floats(content, line)?);
                }
                if probs.is_empty() {
                    return Err(Error::parse(header_line, "product needs at least one coordinate"));
                }
                Ok(ProductDistribution::new(probs)?.into())
            }
            "explicit" => {
                let mut arities: Option<Vec<u32>> = None;
                let mut points = Vec::new();
                let mut masses = Vec::new();
                for (line, content) in lines {
                    if let Some(rest) = content.strip_prefix("arities") {
                        arities = Some(parse_u32s(rest, line)?);
                        continue;
                    }
                    let (point, mass) = content
                        .split_once(';')
                        .ok_or_else(|| Error::parse(line, "expected point;mass"))?;
                    points.push(DataPoint::new(parse_u32s(point, line)?));
                    masses.push(mass.trim().parse::<f64>().map_err(|_| {
                        Error::parse(line, format!("bad mass {:?}", mass.trim()))
                    })?);
                }
                let dim = points.first().map_or(0, DataPoint::dimension);
                if points.iter().any(|p| p.dimension() != dim) {
                    return Err(Error::parse(header_line, "points have differing dimensions"));
                }
                let arities = arities.unwrap_or_else(|| {
                    (0..dim)
                        .map(|c| points.iter().map(|p| p.values()[c]).max().unwrap_or(0) + 1)
                        .collect()
                });
                Ok(ExplicitDistribution::new(Schema::new(arities)?, points, masses)?.into())
            }
            other => Err(Error::parse(
                header_line,
                format!("expected `product` or `explicit`, got {other:?}"),
            )),
        }
    }
}

fn parse_floats(text: &str, line: usize) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("bad probability {:?}", t.trim())))
        })
        .collect()
}

fn parse_u32s(text: &str, line: usize) -> Result<Vec<u32>> {
    text.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| Error::parse(line, format!("bad category index {t:?}")))
        })
        .collect()
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Product(d) => {
                writeln!(f, "product")?;
                for c in d.coordinate_probs() {
                    let row: Vec<String> = c.iter().map(|p| p.to_string()).collect();
                    writeln!(f, "{}", row.join(","))?;
                }
            }
            Distribution::Explicit(d) => {
                writeln!(f, "explicit")?;
                writeln!(f, "arities {}", d.schema())?;
                for (p, m) in d.points().iter().zip(d.masses()) {
                    writeln!(f, "{p};{m}")?;
                }
            }
        }
        Ok(())
    }
}

fn same_schema(nu: &Distribution, mu: &Distribution) -> Result<()> {
    if nu.schema() != mu.schema() {
        return Err(Error::SchemaMismatch(format!(
            "nu is over [{}], mu over [{}]",
            nu.schema(),
            mu.schema()
        )));
    }
    Ok(())
}

/// `Σ_x a(x)² / b(x)` over aligned mass vectors, with `0/0 = 0`.
fn chi_square_plus_one(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<f64> {
    let mut acc = CompensatedSum::default();
    for (a, b) in pairs {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Err(Error::NotDominated);
        }
        acc.add(a * a / b);
    }
    Ok(acc.value())
}

/// Exact `κ(ν‖μ) = Σ_x ν(x)²/μ(x)`. Product pairs factor coordinatewise (summed in log space).
pub fn renyi_condition_number_exact(nu: &Distribution, mu: &Distribution) -> Result<f64> {
    same_schema(nu, mu)?;
    match (nu, mu) {
        (Distribution::Product(n), Distribution::Product(m)) => {
            let mut log_kappa = 0.0;
            for (nc, mc) in n.coordinate_probs().iter().zip(m.coordinate_probs()) {
                let k = chi_square_plus_one(nc.iter().copied().zip(mc.iter().copied()))?;
                log_kappa += k.ln();
            }
            Ok(log_kappa.exp())
        }
        (Distribution::Explicit(n), _) => chi_square_plus_one(
            n.points()
                .iter()
                .zip(n.masses())
                .map(|(x, &a)| (a, mu.mass(x))),
        ),
        (Distribution::Product(n), Distribution::Explicit(_)) => {
            let domain = n.schema().enumerate(MAX_TABLE_DOMAIN)?;
            chi_square_plus_one(domain.points().iter().map(|x| (n.mass(x), mu.mass(x))))
        }
    }
}

/// `(dν/dμ)(x)`; errors where `ν` charges a point `μ` does not.
pub fn density_ratio(nu: &Distribution, mu: &Distribution, x: &DataPoint) -> Result<f64> {
    let (a, b) = match (nu, mu) {
        (Distribution::Product(n), Distribution::Product(m)) => {
            // coordinatewise keeps each factor O(1) for large p
            let mut ratio = 1.0;
            for ((&v, nc), mc) in x.values().iter().zip(n.coordinate_probs()).zip(m.coordinate_probs()) {
                let (a, b) = (nc[v as usize], mc[v as usize]);
                if a == 0.0 {
                    return Ok(0.0);
                }
                if b == 0.0 {
                    return Err(Error::NotDominated);
                }
                ratio *= a / b;
            }
            return Ok(ratio);
        }
        _ => (nu.mass(x), mu.mass(x)),
    };
    if a == 0.0 {
        Ok(0.0)
    } else if b == 0.0 {
        Err(Error::NotDominated)
    } else {
        Ok(a / b)
    }
}

/// Monte-Carlo estimate of `κ(ν‖μ) = E_{X~ν} (dν/dμ)(X)`.
pub fn renyi_condition_number_mc(
    nu: &Distribution,
    mu: &Distribution,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    same_schema(nu, mu)?;
    if samples == 0 {
        return Err(Error::param("need at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = CompensatedSum::default();
    for _ in 0..samples {
        let x = nu.sample_point(&mut rng);
        acc.add(density_ratio(nu, mu, &x)?);
    }
    Ok(acc.value() / samples as f64)
}

/// `κ(φ‖uniform) = |Ω| Σ_x φ(x)²`, the squared `L²/L¹` ratio of the density under uniform μ.
pub fn kappa_uniform(phi: &ExplicitDistribution, omega_size: u128) -> f64 {
    let sum_sq = neumaier_sum(phi.masses().iter().map(|m| m * m));
    omega_size as f64 * sum_sq
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(nu_a: f64) -> (Distribution, Distribution) {
        let schema = Schema::boolean(1);
        let pts = vec![DataPoint::new(vec![0]), DataPoint::new(vec![1])];
        let nu = ExplicitDistribution::new(schema.clone(), pts.clone(), vec![nu_a, 1.0 - nu_a])
            .unwrap();
        let mu = ExplicitDistribution::new(schema, pts, vec![0.5, 0.5]).unwrap();
        (nu.into(), mu.into())
    }

    #[test]
    fn point_mass_sampling() {
        let schema = Schema::boolean(3);
        let z0 = DataPoint::new(vec![1, 0, 1]);
        let d: Distribution = ExplicitDistribution::point_mass(&schema, z0.clone()).unwrap().into();
        let s = d.sample(5, 1).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.points().iter().all(|p| p == &z0));
    }

    #[test]
    fn uniform_bit_frequency() {
        let d: Distribution = ProductDistribution::uniform(&Schema::boolean(1)).into();
        let s = d.sample(100_000, 7).unwrap();
        let ones = s.points().iter().filter(|p| p.values()[0] == 1).count();
        assert!((ones as f64 / 1e5 - 0.5).abs() < 0.01);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let d: Distribution = ProductDistribution::new(vec![vec![0.2, 0.8], vec![0.1, 0.3, 0.6]])
            .unwrap()
            .into();
        assert_eq!(d.sample(50, 3).unwrap(), d.sample(50, 3).unwrap());
        assert_ne!(d.sample(50, 3).unwrap(), d.sample(50, 4).unwrap());
        assert!(d.sample(0, 3).is_err());
    }

    #[test]
    fn zero_mass_categories_never_drawn() {
        let d: Distribution = ProductDistribution::new(vec![vec![0.0, 1.0, 0.0]]).unwrap().into();
        let s = d.sample(1000, 9).unwrap();
        assert!(s.points().iter().all(|p| p.values() == [1]));
    }

    #[test]
    fn kappa_exact_examples() {
        let (nu, mu) = two_point(0.75);
        assert!((renyi_condition_number_exact(&nu, &mu).unwrap() - 1.25).abs() < 1e-12);
        assert!((renyi_condition_number_exact(&mu, &mu).unwrap() - 1.0).abs() < 1e-12);

        let schema = Schema::boolean(2);
        let mu4: Distribution = ExplicitDistribution::uniform(&schema).unwrap().into();
        let delta: Distribution =
            ExplicitDistribution::point_mass(&schema, DataPoint::new(vec![1, 0]))
                .unwrap()
                .into();
        assert!((renyi_condition_number_exact(&delta, &mu4).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn domination_failure() {
        let schema = Schema::boolean(1);
        let nu: Distribution = ExplicitDistribution::uniform(&schema).unwrap().into();
        let mu: Distribution = ExplicitDistribution::point_mass(&schema, DataPoint::new(vec![0]))
            .unwrap()
            .into();
        assert_eq!(renyi_condition_number_exact(&nu, &mu), Err(Error::NotDominated));
        assert_eq!(renyi_condition_number_mc(&nu, &mu, 100, 1), Err(Error::NotDominated));
        // the reverse direction is fine
        assert!((renyi_condition_number_exact(&mu, &nu).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(nu.to_string().lines().next(), Some("explicit"));
    }

    #[test]
    fn kappa_mc_examples() {
        let (nu, mu) = two_point(0.75);
        assert_eq!(renyi_condition_number_mc(&mu, &mu, 1000, 1).unwrap(), 1.0);
        let est = renyi_condition_number_mc(&nu, &mu, 100_000, 2).unwrap();
        assert!((est - 1.25).abs() / 1.25 < 0.05, "{est}");

        let schema = Schema::boolean(2);
        let mu4: Distribution = ExplicitDistribution::uniform(&schema).unwrap().into();
        let delta: Distribution =
            ExplicitDistribution::point_mass(&schema, DataPoint::new(vec![0, 1]))
                .unwrap()
                .into();
        assert_eq!(renyi_condition_number_mc(&delta, &mu4, 500, 3).unwrap(), 4.0);
    }

    #[test]
    fn kappa_mc_mean_over_repetitions() {
        let (nu, mu) = two_point(0.75);
        let reps = 50;
        let mean: f64 = (0..reps)
            .map(|r| renyi_condition_number_mc(&nu, &mu, 10_000, 100 + r).unwrap())
            .sum::<f64>()
            / reps as f64;
        assert!((mean - 1.25).abs() / 1.25 < 0.02, "{mean}");
    }

    #[test]
    fn kappa_uniform_examples() {
        let schema = Schema::boolean(2);
        let uniform = ExplicitDistribution::uniform(&schema).unwrap();
        assert!((kappa_uniform(&uniform, 4) - 1.0).abs() < 1e-12);
        let delta = ExplicitDistribution::point_mass(&schema, DataPoint::new(vec![1, 1])).unwrap();
        assert!((kappa_uniform(&delta, 4) - 4.0).abs() < 1e-12);
        let half = ExplicitDistribution::new(
            schema,
            vec![DataPoint::new(vec![0, 0]), DataPoint::new(vec![0, 1])],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert!((kappa_uniform(&half, 4) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn product_kappa_matches_enumeration() {
        let nu = ProductDistribution::new(vec![vec![0.7, 0.3], vec![0.2, 0.5, 0.3], vec![0.9, 0.1]])
            .unwrap();
        let mu = ProductDistribution::new(vec![vec![0.5, 0.5], vec![0.4, 0.4, 0.2], vec![0.3, 0.7]])
            .unwrap();
        let product = renyi_condition_number_exact(&nu.clone().into(), &mu.clone().into()).unwrap();
        // brute force over all 12 points
        let domain = nu.schema().enumerate(64).unwrap();
        let brute: f64 = domain
            .points()
            .iter()
            .map(|x| nu.mass(x).powi(2) / mu.mass(x))
            .sum();
        assert!((product - brute).abs() < 1e-12);

        let explicit_mu: Distribution = ExplicitDistribution::new(
            mu.schema().clone(),
            domain.points().to_vec(),
            domain.points().iter().map(|x| mu.mass(x)).collect(),
        )
        .unwrap()
        .into();
        let mixed = renyi_condition_number_exact(&nu.into(), &explicit_mu).unwrap();
        assert!((mixed - brute).abs() < 1e-12);
    }

    #[test]
    fn product_kappa_in_log_space_handles_large_dimension() {
        let nu = ProductDistribution::new(vec![vec![0.9, 0.1]; 400]).unwrap();
        let mu = ProductDistribution::uniform(&Schema::boolean(400));
        let k = renyi_condition_number_exact(&nu.into(), &mu.into()).unwrap();
        // per coordinate: (0.81 + 0.01) / 0.5 = 1.64
        let want = (400.0 * 1.64f64.ln()).exp();
        assert!(((k - want) / want).abs() < 1e-10);
    }

    #[test]
    fn exact_statistics_of_product() {
        let nu: Distribution = ProductDistribution::new(vec![vec![0.25, 0.75], vec![0.5, 0.5]])
            .unwrap()
            .into();
        let fam = crate::queries::marginal_family(2, 2, crate::queries::MarginalKind::Monotone)
            .unwrap();
        let stats = nu.exact_statistics(&fam).unwrap();
        for (got, want) in stats.values().iter().zip([1.0, 0.75, 0.5, 0.375]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_text_parsing() {
        let product = Distribution::parse("product\n0.5,0.5\n# comment\n0.25,0.75\n").unwrap();
        assert_eq!(product.schema().arities(), &[2, 2]);
        let explicit = Distribution::parse("explicit\n0;0.75\n1;0.25\n").unwrap();
        assert_eq!(explicit.schema().arities(), &[2]);
        assert_eq!(explicit.mass(&DataPoint::new(vec![0])), 0.75);
        let with_arities = Distribution::parse("explicit\narities 3\n0;1\n").unwrap();
        assert_eq!(with_arities.schema().arities(), &[3]);
        let reparsed = Distribution::parse(&with_arities.to_string()).unwrap();
        assert_eq!(reparsed.schema(), with_arities.schema());

        assert!(matches!(
            Distribution::parse("explicit\n0;0.5\n0;0.5\n"),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            Distribution::parse("product\n0.5,x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Distribution::parse("product\n0.5,0.6\n").is_err());
        assert!(Distribution::parse("gaussian\n").is_err());
    }

    #[test]
    fn kappa_is_one_only_for_equal_measures() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let schema = Schema::new(vec![5]).unwrap();
        let pts: Vec<DataPoint> = (0..5).map(|v| DataPoint::new(vec![v])).collect();
        for _ in 0..200 {
            let raw: Vec<f64> = (0..5).map(|_| rng.gen_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut masses: Vec<f64> = raw.iter().map(|r| r / total).collect();
            let fix = 1.0 - masses[..4].iter().sum::<f64>();
            masses[4] = fix;
            let nu: Distribution =
                ExplicitDistribution::new(schema.clone(), pts.clone(), masses).unwrap().into();
            let mu: Distribution = ExplicitDistribution::uniform(&schema).unwrap().into();
            assert!(renyi_condition_number_exact(&nu, &mu).unwrap() > 1.0);
            assert!((renyi_condition_number_exact(&nu, &nu).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
