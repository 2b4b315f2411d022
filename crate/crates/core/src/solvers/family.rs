use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eta::symmetrize;
use crate::qcore::Eta;
use crate::qmatrix::QMatrix;

/// Declared shape of one free parameter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamShape {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    /// Set when the parameter must itself be η-Hermitian.
    pub eta_hermitian: Option<Eta>,
}

impl ParamShape {
    pub fn new(name: impl Into<String>, shape: (usize, usize)) -> Self {
        ParamShape { name: name.into(), rows: shape.0, cols: shape.1, eta_hermitian: None }
    }

    pub fn eta_hermitian(name: impl Into<String>, n: usize, eta: Eta) -> Self {
        ParamShape { name: name.into(), rows: n, cols: n, eta_hermitian: Some(eta) }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// Name-based view of a positional parameter list.
pub struct Params<'a> {
    shapes: &'a [ParamShape],
    values: &'a [QMatrix],
}

impl<'a> Params<'a> {
    pub fn get(&self, name: &str) -> &'a QMatrix {
        let i = self
            .shapes
            .iter()
            .position(|s| s.name == name)
            .unwrap_or_else(|| panic!("undeclared free parameter {name}"));
        &self.values[i]
    }
}

type Assemble<S> = Arc<dyn Fn(&[QMatrix]) -> Result<S> + Send + Sync>;

/// A particular solution plus a parametrization of every solution.
#[derive(Clone)]
pub struct Family<S> {
    pub particular: S,
    params: Vec<ParamShape>,
    assemble: Assemble<S>,
}

impl<S: Clone + 'static> Family<S> {
    /// Builds a family from an assembler that looks parameters up by name.
    pub fn from_named<F>(params: Vec<ParamShape>, f: F) -> Result<Self>
    where
        F: Fn(&Params) -> Result<S> + Send + Sync + 'static,
    {
        let shapes = params.clone();
        let assemble: Assemble<S> = Arc::new(move |values| f(&Params { shapes: &shapes, values }));
        Self::from_positional(params, assemble)
    }

    fn from_positional(params: Vec<ParamShape>, assemble: Assemble<S>) -> Result<Self> {
        let zeros: Vec<QMatrix> = params.iter().map(|p| QMatrix::zeros(p.rows, p.cols)).collect();
        let particular = assemble(&zeros)?;
        Ok(Family { particular, params, assemble })
    }

    pub fn params(&self) -> &[ParamShape] {
        &self.params
    }

    /// Evaluates the family at the given parameters, in declaration order.
    pub fn assemble(&self, values: &[QMatrix]) -> Result<S> {
        if values.len() != self.params.len() {
            return Err(Error::Shape(format!(
                "family expects {} free parameters, got {}",
                self.params.len(),
                values.len()
            )));
        }
        for (p, v) in self.params.iter().zip(values) {
            if p.shape() != v.shape() {
                return Err(Error::Shape(format!("free parameter {} must be {:?}, got {:?}", p.name, p.shape(), v.shape())));
            }
            if let Some(eta) = p.eta_hermitian {
                let d = (v - &v.eta_conj_transpose(eta)).frobenius_norm();
                if d > 1e-9 * (1.0 + v.frobenius_norm()) {
                    return Err(Error::Precondition(format!("free parameter {} must be {eta}-Hermitian", p.name)));
                }
            }
        }
        (self.assemble)(values)
    }

    /// Evaluates the family at parameters looked up by name; missing names are zero.
    pub fn assemble_named(&self, lookup: impl Fn(&str) -> Option<QMatrix>) -> Result<S> {
        let values: Vec<QMatrix> = self
            .params
            .iter()
            .map(|p| lookup(&p.name).unwrap_or_else(|| QMatrix::zeros(p.rows, p.cols)))
            .collect();
        self.assemble(&values)
    }

    pub fn zero_params(&self) -> Vec<QMatrix> {
        self.params.iter().map(|p| QMatrix::zeros(p.rows, p.cols)).collect()
    }

    /// Standard-normal parameters, η-symmetrized where the declaration asks for it.
    pub fn random_params<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<QMatrix> {
        self.params
            .iter()
            .map(|p| {
                let m = QMatrix::random(p.rows, p.cols, rng);
                match p.eta_hermitian {
                    Some(eta) => symmetrize(&m, eta).expect("square by declaration"),
                    None => m,
                }
            })
            .collect()
    }

    /// Post-composes the assembler.
    pub fn map<T, F>(self, f: F) -> Result<Family<T>>
    where
        T: Clone + 'static,
        F: Fn(S) -> Result<T> + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        let particular = f(self.particular)?;
        let inner = self.assemble;
        let assemble: Assemble<T> = Arc::new(move |values| f(inner(values)?));
        Ok(Family { particular, params: self.params, assemble })
    }

    /// Renames declared parameters; positions are unchanged.
    pub fn rename(mut self, pairs: &[(&str, &str)]) -> Self {
        for p in &mut self.params {
            if let Some((_, to)) = pairs.iter().find(|(from, _)| *from == p.name) {
                p.name = (*to).to_string();
            }
        }
        self
    }
}

impl<S: std::fmt::Debug> std::fmt::Debug for Family<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Family").field("particular", &self.particular).field("params", &self.params).finish()
    }
}
