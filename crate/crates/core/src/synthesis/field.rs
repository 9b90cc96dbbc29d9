use std::sync::Arc;

use crate::matrix::CMat2;

/// A hermitian 2×2 matrix field over continuum coordinates `(t, x)`.
///
/// Implementors may supply analytic partial derivatives; synthesis falls back
/// to finite differences when they return `None`.
pub trait HermitianField: Send + Sync {
    fn value(&self, t: f64, x: f64) -> CMat2;

    fn dt_value(&self, _t: f64, _x: f64) -> Option<CMat2> {
        None
    }

    fn dx_value(&self, _t: f64, _x: f64) -> Option<CMat2> {
        None
    }

    /// Whether the field is independent of `t`. Enables operator caching.
    fn is_static(&self) -> bool {
        false
    }

    fn contains(&self, _t: f64, _x: f64) -> bool {
        true
    }
}

impl<F: HermitianField + ?Sized> HermitianField for &F {
    fn value(&self, t: f64, x: f64) -> CMat2 {
        (**self).value(t, x)
    }
    fn dt_value(&self, t: f64, x: f64) -> Option<CMat2> {
        (**self).dt_value(t, x)
    }
    fn dx_value(&self, t: f64, x: f64) -> Option<CMat2> {
        (**self).dx_value(t, x)
    }
    fn is_static(&self) -> bool {
        (**self).is_static()
    }
    fn contains(&self, t: f64, x: f64) -> bool {
        (**self).contains(t, x)
    }
}

impl<F: HermitianField + ?Sized> HermitianField for Arc<F> {
    fn value(&self, t: f64, x: f64) -> CMat2 {
        (**self).value(t, x)
    }
    fn dt_value(&self, t: f64, x: f64) -> Option<CMat2> {
        (**self).dt_value(t, x)
    }
    fn dx_value(&self, t: f64, x: f64) -> Option<CMat2> {
        (**self).dx_value(t, x)
    }
    fn is_static(&self) -> bool {
        (**self).is_static()
    }
    fn contains(&self, t: f64, x: f64) -> bool {
        (**self).contains(t, x)
    }
}

/// A spacetime-independent field.
#[derive(Debug, Clone, Copy)]
pub struct ConstantField(pub CMat2);

impl HermitianField for ConstantField {
    fn value(&self, _t: f64, _x: f64) -> CMat2 {
        self.0
    }
    fn dt_value(&self, _t: f64, _x: f64) -> Option<CMat2> {
        Some(CMat2::zeros())
    }
    fn dx_value(&self, _t: f64, _x: f64) -> Option<CMat2> {
        Some(CMat2::zeros())
    }
    fn is_static(&self) -> bool {
        true
    }
}

type FieldFn = Box<dyn Fn(f64, f64) -> CMat2 + Send + Sync>;

/// A field defined by closures.
pub struct FnField {
    value: FieldFn,
    dt: Option<FieldFn>,
    dx: Option<FieldFn>,
    is_static: bool,
}

impl FnField {
    pub fn new(value: impl Fn(f64, f64) -> CMat2 + Send + Sync + 'static) -> Self {
        Self { value: Box::new(value), dt: None, dx: None, is_static: false }
    }

    /// A field that ignores `t`; the closure still receives it.
    pub fn stationary(value: impl Fn(f64, f64) -> CMat2 + Send + Sync + 'static) -> Self {
        Self { is_static: true, ..Self::new(value) }
    }

    pub fn with_derivatives(
        mut self,
        dt: impl Fn(f64, f64) -> CMat2 + Send + Sync + 'static,
        dx: impl Fn(f64, f64) -> CMat2 + Send + Sync + 'static,
    ) -> Self {
        self.dt = Some(Box::new(dt));
        self.dx = Some(Box::new(dx));
        self
    }
}

impl HermitianField for FnField {
    fn value(&self, t: f64, x: f64) -> CMat2 {
        (self.value)(t, x)
    }
    fn dt_value(&self, t: f64, x: f64) -> Option<CMat2> {
        self.dt.as_ref().map(|f| f(t, x))
    }
    fn dx_value(&self, t: f64, x: f64) -> Option<CMat2> {
        self.dx.as_ref().map(|f| f(t, x))
    }
    fn is_static(&self) -> bool {
        self.is_static
    }
}

impl std::fmt::Debug for FnField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnField")
            .field("analytic_derivatives", &self.dt.is_some())
            .field("is_static", &self.is_static)
            .finish()
    }
}
