//! Seeded synthetic populations.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Population models with a generator in this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelId {
    /// `y = sqrt(x1^2 + x2^2) + cos(pi (x3 + x4)) + noise`, X uniform on the
    /// radius-sqrt(2) sphere.
    Fig2,
    /// `y = noise`, X uniform on the unit cube.
    Zero,
}

impl ModelId {
    pub fn name(self) -> &'static str {
        match self {
            ModelId::Fig2 => "fig2",
            ModelId::Zero => "zero",
        }
    }

    pub fn min_dim(self) -> usize {
        match self {
            ModelId::Fig2 => 4,
            ModelId::Zero => 1,
        }
    }

    /// Noiseless regression function evaluated at one covariate row.
    pub fn regression(self, x: ArrayView1<f64>) -> f64 {
        match self {
            ModelId::Fig2 => (x[0] * x[0] + x[1] * x[1]).sqrt() + (PI * (x[2] + x[3])).cos(),
            ModelId::Zero => 0.0,
        }
    }

    /// Draws `n` covariate rows from the model's design distribution.
    pub fn sample_covariates(self, n: usize, d: usize, rng: &mut Rng) -> Result<Array2<f64>> {
        if d < self.min_dim() {
            return Err(Error::invalid(format!(
                "model {} needs d >= {}, got {d}",
                self.name(),
                self.min_dim()
            )));
        }
        Ok(match self {
            ModelId::Fig2 => sphere_rows(n, d, SQRT_2, rng),
            ModelId::Zero => Array2::from_shape_fn((n, d), |_| rng.random::<f64>()),
        })
    }

    pub fn true_values(self, x: &Array2<f64>) -> Array1<f64> {
        x.rows().into_iter().map(|r| self.regression(r)).collect()
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(ModelId::Fig2),
            "zero" => Ok(ModelId::Zero),
            other => Err(Error::invalid(format!("unknown model `{other}`"))),
        }
    }
}

/// A sample `(X_i, Y_i)` with the noiseless values `m(X_i)` kept alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub m_true: Array1<f64>,
    pub sigma: f64,
    pub model_id: ModelId,
    pub seed: u64,
}

/// JSON sidecar written next to a dataset CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub model_id: ModelId,
    pub n: usize,
    pub d: usize,
    pub sigma: f64,
    pub seed: u64,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            model_id: self.model_id,
            n: self.n(),
            d: self.d(),
            sigma: self.sigma,
            seed: self.seed,
        }
    }

    /// Writes `x1..xd,y,m_true` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.d()).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        header.push("m_true".into());
        w.write_record(&header)?;
        for (i, row) in self.x.rows().into_iter().enumerate() {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(self.y[i].to_string());
            rec.push(self.m_true[i].to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        self.write_csv(std::fs::File::create(dir.join(format!("{stem}.csv")))?)?;
        let meta = serde_json::to_string_pretty(&self.meta())?;
        std::fs::write(dir.join(format!("{stem}.json")), meta + "\n")?;
        Ok(())
    }
}

fn sphere_rows(n: usize, d: usize, radius: f64, rng: &mut Rng) -> Array2<f64> {
    let mut x = Array2::zeros((n, d));
    for mut row in x.rows_mut() {
        loop {
            row.iter_mut().for_each(|v: &mut f64| *v = StandardNormal.sample(rng));
            let norm = row.dot(&row).sqrt();
            if norm > 0.0 {
                row.mapv_inplace(|v| v / norm * radius);
                break;
            }
        }
    }
    x
}

fn check_dims(n: usize, d: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if d == 0 {
        return Err(Error::invalid("d must be at least 1"));
    }
    Ok(())
}

/// `n` points uniform on the sphere of the given radius in `R^d`.
pub fn sample_sphere(n: usize, d: usize, radius: f64, seed: u64) -> Result<Array2<f64>> {
    check_dims(n, d)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    let mut rng = rng::stream(seed, &[rng::tag("sphere")]);
    Ok(sphere_rows(n, d, radius, &mut rng))
}

/// `n` points uniform in the closed unit ball of `R^d`.
pub fn sample_ball(n: usize, d: usize, seed: u64) -> Result<Array2<f64>> {
    check_dims(n, d)?;
    let mut rng = rng::stream(seed, &[rng::tag("ball")]);
    let mut x = sphere_rows(n, d, 1.0, &mut rng);
    let inv_d = 1.0 / d as f64;
    for mut row in x.rows_mut() {
        let r = rng.random::<f64>().powf(inv_d);
        row.mapv_inplace(|v| v * r);
    }
    Ok(x)
}

/// Generic generator: covariates from the model's design, then noise.
pub fn generate(model: ModelId, n: usize, d: usize, sigma: f64, seed: u64) -> Result<Dataset> {
    check_dims(n, d)?;
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("noise sd must be >= 0, got {sigma}")));
    }
    let mut rng = rng::stream(seed, &[rng::tag(model.name()), n as u64, d as u64]);
    let x = model.sample_covariates(n, d, &mut rng)?;
    let m_true = model.true_values(&x);
    let y = m_true.mapv(|m| {
        let eps: f64 = StandardNormal.sample(&mut rng);
        m + sigma * eps
    });
    Ok(Dataset {
        x,
        y,
        m_true,
        sigma,
        model_id: model,
        seed,
    })
}

/// Radial-plus-cosine model on the radius-sqrt(2) sphere (`d >= 4`).
pub fn gen_fig2(n: usize, d: usize, noise_sd: f64, seed: u64) -> Result<Dataset> {
    generate(ModelId::Fig2, n, d, noise_sd, seed)
}

/// Pure-noise model `m = 0` with covariates uniform on `[0,1]^d`.
pub fn gen_zero_model(n: usize, d: usize, sigma: f64, seed: u64) -> Result<Dataset> {
    generate(ModelId::Zero, n, d, sigma, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn sphere_rows_have_declared_radius() {
        let x = sample_sphere(5, 3, SQRT_2, 7).unwrap();
        for row in x.rows() {
            let norm = row.dot(&row).sqrt();
            assert!((norm - SQRT_2).abs() <= 1e-12 * SQRT_2);
        }
    }

    #[test]
    fn zero_sphere_in_one_dimension_is_two_points() {
        for seed in 0..20 {
            let x = sample_sphere(1, 1, 1.0, seed).unwrap();
            assert_eq!(x[[0, 0]].abs(), 1.0);
        }
    }

    #[test]
    fn sphere_coordinates_are_centered() {
        let n = 10_000;
        let x = sample_sphere(n, 4, 1.0, 1).unwrap();
        let tol = 4.0 / (n as f64).sqrt();
        for col in x.columns() {
            assert!(col.mean().unwrap().abs() < tol);
        }
    }

    #[test]
    fn sphere_rejects_bad_arguments() {
        assert!(sample_sphere(3, 0, 1.0, 0).is_err());
        assert!(sample_sphere(3, 2, 0.0, 0).is_err());
        assert!(sample_sphere(3, 2, -1.0, 0).is_err());
    }

    #[test]
    fn ball_membership_and_determinism() {
        let x = sample_ball(100, 2, 3).unwrap();
        assert!(x.rows().into_iter().all(|r| r.dot(&r).sqrt() <= 1.0));
        assert_eq!(x, sample_ball(100, 2, 3).unwrap());
        assert!(sample_ball(10, 0, 3).is_err());
    }

    #[test]
    fn one_dimensional_ball_is_centered() {
        let x = sample_ball(10_000, 1, 11).unwrap();
        assert!(x.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert!(x.mean().unwrap().abs() < 0.04);
    }

    #[test]
    fn fig2_regression_at_pole() {
        let row = array![SQRT_2, 0.0, 0.0, 0.0, 0.0];
        assert!((ModelId::Fig2.regression(row.view()) - (SQRT_2 + 1.0)).abs() < 1e-15);
        assert!((SQRT_2 + 1.0 - 2.414214).abs() < 1e-6);
    }

    #[test]
    fn fig2_shape_and_noise_free_targets() {
        let data = gen_fig2(1024, 32, 0.2, 5).unwrap();
        assert_eq!(data.x.dim(), (1024, 32));
        for row in data.x.rows() {
            assert!((row.dot(&row).sqrt() - SQRT_2).abs() <= 1e-12 * SQRT_2);
        }
        let clean = gen_fig2(50, 6, 0.0, 5).unwrap();
        assert_eq!(clean.y, clean.m_true);
        assert!(gen_fig2(10, 3, 0.2, 5).is_err());
    }

    #[test]
    fn zero_model_targets() {
        let quiet = gen_zero_model(40, 1, 0.0, 2).unwrap();
        assert!(quiet.y.iter().all(|&v| v == 0.0));
        assert!(quiet.m_true.iter().all(|&v| v == 0.0));
        assert!(quiet.x.iter().all(|v| (0.0..1.0).contains(v)));

        let noisy = gen_zero_model(10_000, 1, 1.0, 9).unwrap();
        let var = noisy.y.var(1.0);
        assert!((0.94..=1.06).contains(&var), "variance {var}");
        assert!(noisy.m_true.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identical_arguments_give_identical_datasets() {
        let a = gen_fig2(30, 5, 0.2, 42).unwrap();
        let b = gen_fig2(30, 5, 0.2, 42).unwrap();
        assert_eq!(a, b);
        let c = gen_fig2(30, 5, 0.2, 43).unwrap();
        assert_ne!(a.y, c.y);
    }

    #[test]
    fn csv_has_expected_header() {
        let data = gen_zero_model(3, 2, 1.0, 1).unwrap();
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x1,x2,y,m_true\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
