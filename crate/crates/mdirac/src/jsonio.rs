//! Shared JSON wire formats.
//!
//! Matrices serialize as row-major real/imaginary grids:
//! `{"rows": R, "cols": C, "re": [[..]], "im": [[..]]}` with plain decimal
//! floats, so any language can parse them without binary ambiguity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FourierField;
use crate::linalg::{CMat, C64, Tolerances};
use crate::nk::{CanonicalForm, CanonicalPair, NkPair, Provenance};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        let (rows, cols) = m.shape();
        let re = (0..rows)
            .map(|r| (0..cols).map(|c| m[(r, c)].re).collect())
            .collect();
        let im = (0..rows)
            .map(|r| (0..cols).map(|c| m[(r, c)].im).collect())
            .collect();
        MatrixJson { rows, cols, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let check = |grid: &Vec<Vec<f64>>, name: &str| -> Result<()> {
            if grid.len() != self.rows || grid.iter().any(|row| row.len() != self.cols) {
                return Err(Error::ShapeMismatch {
                    expected: format!("{}x{} {name} grid", self.rows, self.cols),
                    got: format!(
                        "{} rows, first row {}",
                        grid.len(),
                        grid.first().map_or(0, |r| r.len())
                    ),
                });
            }
            Ok(())
        };
        check(&self.re, "re")?;
        check(&self.im, "im")?;
        Ok(CMat::from_fn(self.rows, self.cols, |r, c| {
            C64::new(self.re[r][c], self.im[r][c])
        }))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NkPairJson {
    pub l: usize,
    #[serde(rename = "N")]
    pub n: MatrixJson,
    #[serde(rename = "K")]
    pub k: MatrixJson,
    pub provenance: Provenance,
}

impl NkPairJson {
    pub fn from_pair(pair: &NkPair) -> Self {
        NkPairJson {
            l: pair.l,
            n: MatrixJson::from_matrix(&pair.n),
            k: MatrixJson::from_matrix(&pair.k),
            provenance: pair.provenance,
        }
    }

    /// Structural flags are recomputed on load, not trusted from the file.
    pub fn to_pair(&self, tol: &Tolerances) -> Result<NkPair> {
        let n = self.n.to_matrix()?;
        let k = self.k.to_matrix()?;
        if n.nrows() != self.l {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", self.l),
                got: format!("{}x{}", n.nrows(), n.ncols()),
            });
        }
        let mut pair = NkPair::from_matrices(n, k, tol)?;
        pair.provenance = self.provenance;
        Ok(pair)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldTermJson {
    pub p: [f64; 4],
    #[serde(rename = "C")]
    pub c: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierFieldJson {
    pub rows: usize,
    pub cols: usize,
    pub terms: Vec<FieldTermJson>,
}

impl FourierFieldJson {
    pub fn from_field(f: &FourierField) -> Self {
        FourierFieldJson {
            rows: f.rows(),
            cols: f.cols(),
            terms: f
                .terms()
                .map(|(p, c)| FieldTermJson {
                    p,
                    c: MatrixJson::from_matrix(c),
                })
                .collect(),
        }
    }

    pub fn to_field(&self) -> Result<FourierField> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push((t.p, t.c.to_matrix()?));
        }
        FourierField::from_terms(self.rows, self.cols, terms)
    }
}

/// Gauge potential: four per-component exponential sums.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaugeFieldJson {
    pub l: usize,
    pub components: Vec<FourierFieldJson>,
}

impl GaugeFieldJson {
    pub fn from_field(a: &crate::gauge::GaugeField) -> Self {
        GaugeFieldJson {
            l: a.l,
            components: a.comps.iter().map(FourierFieldJson::from_field).collect(),
        }
    }

    pub fn to_field(&self) -> Result<crate::gauge::GaugeField> {
        if self.components.len() != 4 {
            return Err(Error::ShapeMismatch {
                expected: "4 components".into(),
                got: format!("{}", self.components.len()),
            });
        }
        let mut comps = Vec::with_capacity(4);
        for c in &self.components {
            comps.push(c.to_field()?);
        }
        crate::gauge::GaugeField::new(comps.try_into().expect("length checked"))
    }
}

/// Field strength: the six independent components f_{μν} with μ < ν.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldStrengthJson {
    pub l: usize,
    pub components: Vec<StrengthComponentJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrengthComponentJson {
    pub mu: usize,
    pub nu: usize,
    pub f: FourierFieldJson,
}

impl FieldStrengthJson {
    pub fn from_strength(f: &crate::gauge::FieldStrength) -> Self {
        let mut components = Vec::with_capacity(6);
        for mu in 0..4 {
            for nu in mu + 1..4 {
                components.push(StrengthComponentJson {
                    mu,
                    nu,
                    f: FourierFieldJson::from_field(f.component(mu, nu)),
                });
            }
        }
        FieldStrengthJson { l: f.l, components }
    }

    pub fn to_strength(&self) -> Result<crate::gauge::FieldStrength> {
        let mut upper = Vec::with_capacity(self.components.len());
        for c in &self.components {
            upper.push((c.mu, c.nu, c.f.to_field()?));
        }
        crate::gauge::FieldStrength::from_upper_components(self.l, upper)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LieBasisJson {
    pub l: usize,
    pub dim_r: usize,
    pub elements: Vec<MatrixJson>,
}

impl LieBasisJson {
    pub fn from_basis(b: &crate::commutant::LieBasis) -> Self {
        LieBasisJson {
            l: b.l,
            dim_r: b.dim_r,
            elements: b.elements.iter().map(MatrixJson::from_matrix).collect(),
        }
    }
}

/// Canonical description: `form` is `"angles"` or `"signs"`; the unused
/// fields of the other form are omitted.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalJson {
    pub form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    pub xi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signs_n: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signs_k: Option<Vec<i8>>,
    #[serde(rename = "U")]
    pub u: MatrixJson,
}

impl CanonicalJson {
    pub fn from_canonical(c: &CanonicalPair) -> Self {
        match &c.form {
            CanonicalForm::Angles { p, q, xi, eta } => CanonicalJson {
                form: "angles".into(),
                p: Some(*p),
                q: Some(*q),
                xi: *xi,
                eta: Some(*eta),
                signs_n: None,
                signs_k: None,
                u: MatrixJson::from_matrix(&c.u),
            },
            CanonicalForm::Signs { xi, signs_n, signs_k } => CanonicalJson {
                form: "signs".into(),
                p: None,
                q: None,
                xi: *xi,
                eta: None,
                signs_n: Some(signs_n.clone()),
                signs_k: Some(signs_k.clone()),
                u: MatrixJson::from_matrix(&c.u),
            },
        }
    }

    pub fn to_canonical(&self) -> Result<CanonicalPair> {
        let u = self.u.to_matrix()?;
        let form = match self.form.as_str() {
            "angles" => CanonicalForm::Angles {
                p: self.p.ok_or_else(|| missing("p"))?,
                q: self.q.ok_or_else(|| missing("q"))?,
                xi: self.xi,
                eta: self.eta.ok_or_else(|| missing("eta"))?,
            },
            "signs" => {
                let signs_n = self.signs_n.clone().ok_or_else(|| missing("signs_n"))?;
                let signs_k = self
                    .signs_k
                    .clone()
                    .unwrap_or_else(|| signs_n.clone());
                CanonicalForm::Signs {
                    xi: self.xi,
                    signs_n,
                    signs_k,
                }
            }
            other => {
                return Err(Error::ConstraintViolation(format!(
                    "unknown canonical form {other:?}"
                )))
            }
        };
        Ok(CanonicalPair { form, u })
    }
}

fn missing(field: &str) -> Error {
    Error::ConstraintViolation(format!("canonical form missing field {field}"))
}

/// Output of a pair validation run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationJson {
    pub l: usize,
    pub commutator_residual: f64,
    pub completeness_residual: f64,
    pub consistent: bool,
    pub two_level: bool,
    pub hermitian: bool,
}

/// Plane-wave solution: momentum, mass, and the amplitude basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlaneWaveJson {
    pub p: [f64; 4],
    pub m: f64,
    pub dimension: usize,
    pub on_shell_residual: f64,
    pub basis: Vec<MatrixJson>,
    pub nk: NkPairJson,
}

impl PlaneWaveJson {
    pub fn from_solution(s: &crate::dirac::PlaneWaveSolution) -> Self {
        PlaneWaveJson {
            p: s.p,
            m: s.m,
            dimension: s.dimension(),
            on_shell_residual: s.on_shell_residual(),
            basis: s.basis.iter().map(MatrixJson::from_matrix).collect(),
            nk: NkPairJson::from_pair(&s.nk),
        }
    }
}
