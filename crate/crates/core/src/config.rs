use serde::{Deserialize, Serialize};

/// Numerical tolerances and resolution knobs shared by all modules.
///
/// Field names mirror the flat dotted configuration keys used by the CLI
/// (`tol.symplectic`, `ode.steps`, ...).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// `tol.symplectic`: bound on ‖MᵀJ₀M − J₀‖∞.
    pub tol_symplectic: f64,
    /// `tol.rank`: singular values below this count as zero.
    pub tol_rank: f64,
    /// `tol.zero_eig`: upper bound for the zero-eigenvalue threshold of discretized operators.
    pub tol_zero_eig: f64,
    /// `tol.form`: crossing-form eigenvalues below this make a crossing irregular.
    pub tol_form: f64,
    /// `tol.time`: crossing location accuracy.
    pub tol_time: f64,
    /// `ode.steps`: fixed integration steps per period.
    pub ode_steps: usize,
    /// `fourier.K`: Fourier truncation for asymptotic operators.
    pub fourier_k: usize,
    /// `family.grid`: initial s-grid for spectral flow.
    pub family_grid: usize,
    /// `shooting.max_iter`: Newton iteration cap for brake-orbit shooting.
    pub shooting_max_iter: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol_symplectic: 1e-9,
            tol_rank: 1e-8,
            tol_zero_eig: 1e-6,
            tol_form: 1e-6,
            tol_time: 1e-10,
            ode_steps: 4096,
            fourier_k: 32,
            family_grid: 64,
            shooting_max_iter: 100,
        }
    }
}

impl Config {
    /// Dotted keys accepted by [`Config::set`], in a fixed order.
    pub const KEYS: [&'static str; 9] = [
        "tol.symplectic",
        "tol.rank",
        "tol.zero_eig",
        "tol.form",
        "tol.time",
        "ode.steps",
        "fourier.K",
        "family.grid",
        "shooting.max_iter",
    ];

    /// Sets a value by its dotted key.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        let as_count = |v: f64| -> Result<usize, String> {
            if v.is_finite() && v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(format!("{key}: expected a positive integer, got {v}"))
            }
        };
        let as_tol = |v: f64| -> Result<f64, String> {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(format!("{key}: expected a positive tolerance, got {v}"))
            }
        };
        match key {
            "tol.symplectic" => self.tol_symplectic = as_tol(value)?,
            "tol.rank" => self.tol_rank = as_tol(value)?,
            "tol.zero_eig" => self.tol_zero_eig = as_tol(value)?,
            "tol.form" => self.tol_form = as_tol(value)?,
            "tol.time" => self.tol_time = as_tol(value)?,
            "ode.steps" => self.ode_steps = as_count(value)?,
            "fourier.K" => self.fourier_k = as_count(value)?,
            "family.grid" => self.family_grid = as_count(value)?,
            "shooting.max_iter" => self.shooting_max_iter = as_count(value)?,
            _ => return Err(format!("unknown config key '{key}'")),
        }
        Ok(())
    }

    /// Value by dotted key, as `f64`.
    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "tol.symplectic" => self.tol_symplectic,
            "tol.rank" => self.tol_rank,
            "tol.zero_eig" => self.tol_zero_eig,
            "tol.form" => self.tol_form,
            "tol.time" => self.tol_time,
            "ode.steps" => self.ode_steps as f64,
            "fourier.K" => self.fourier_k as f64,
            "family.grid" => self.family_grid as f64,
            "shooting.max_iter" => self.shooting_max_iter as f64,
            _ => return None,
        })
    }
}
