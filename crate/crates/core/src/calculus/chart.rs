use crate::ambient::Vec6;
use crate::calculus::jet::{Jet2, Real};
use crate::error::Result;

/// Exact second-order data of a map from a 2D chart into ℝ⁶.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub value: Vec6,
    pub d1: Vec6,
    pub d2: Vec6,
    pub d11: Vec6,
    pub d12: Vec6,
    pub d22: Vec6,
}

impl Frame {
    pub fn from_jets(j: &[Jet2; 6]) -> Self {
        Self {
            value: Vec6::from_fn(|i, _| j[i].v),
            d1: Vec6::from_fn(|i, _| j[i].d1),
            d2: Vec6::from_fn(|i, _| j[i].d2),
            d11: Vec6::from_fn(|i, _| j[i].d11),
            d12: Vec6::from_fn(|i, _| j[i].d12),
            d22: Vec6::from_fn(|i, _| j[i].d22),
        }
    }
}

/// A closed-form map `(u, v) ↦ ℝ⁶`, generic over the scalar so the same code
/// path serves plain evaluation and jet evaluation.
pub trait ClosedForm: Sync {
    fn eval<S: Real>(&self, u: S, v: S) -> [S; 6];

    /// Rejects chart coordinates outside the map's domain.
    fn check_domain(&self, _u: f64, _v: f64) -> Result<()> {
        Ok(())
    }
}

/// Object-safe view of a twice-differentiable chart map.
pub trait ChartMap: Sync {
    fn value(&self, u: f64, v: f64) -> Result<Vec6>;
    fn jet(&self, u: f64, v: f64) -> Result<Frame>;
}

impl<T: ClosedForm> ChartMap for T {
    fn value(&self, u: f64, v: f64) -> Result<Vec6> {
        self.check_domain(u, v)?;
        let out = self.eval(u, v);
        Ok(Vec6::from_row_slice(&out))
    }

    fn jet(&self, u: f64, v: f64) -> Result<Frame> {
        self.check_domain(u, v)?;
        Ok(Frame::from_jets(&self.eval(Jet2::var1(u), Jet2::var2(v))))
    }
}

/// Jet of a chart map at a point; alias kept for symmetry with the other operators.
pub fn jet_eval<M: ChartMap + ?Sized>(map: &M, u: f64, v: f64) -> Result<Frame> {
    map.jet(u, v)
}
