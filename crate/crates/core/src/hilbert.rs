//! Finite-dimensional state vectors over a labelled orthonormal basis.
//!
//! Outcome subspaces are coordinate subspaces of that basis, so projections
//! are exact coordinate restrictions. States given in another basis can be
//! brought into the measurement basis with [`StateVector::change_basis`].

use std::collections::HashSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Scalar, ScalarField};

/// Tolerance (relative to the pointer norms) below which two pointer states
/// count as orthogonal.
pub const POINTER_ORTHOGONALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    field: ScalarField,
    labels: Vec<String>,
    coeffs: Vec<Scalar>,
}

impl StateVector {
    pub fn new<L: Into<String>>(
        field: ScalarField,
        labels: impl IntoIterator<Item = L>,
        coeffs: Vec<Scalar>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidState(
                "a state needs at least one basis vector".into(),
            ));
        }
        if labels.len() != coeffs.len() {
            return Err(Error::InvalidState(format!(
                "{} basis labels but {} coefficients",
                labels.len(),
                coeffs.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidState(format!(
                "duplicate basis label `{dup}`"
            )));
        }
        if let Some(c) = coeffs.iter().find(|c| c.field() != field) {
            return Err(Error::FieldMismatch {
                left: field,
                right: c.field(),
            });
        }
        if coeffs
            .iter()
            .flat_map(|c| c.components())
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidState("non-finite coefficient".into()));
        }
        Ok(StateVector {
            field,
            labels,
            coeffs,
        })
    }

    /// Real-coefficient state, embedded into `field`.
    pub fn from_reals<L: Into<String>>(
        field: ScalarField,
        labels: impl IntoIterator<Item = L>,
        values: &[f64],
    ) -> Result<Self> {
        let coeffs = values
            .iter()
            .map(|&v| Scalar::real(v).embed(field))
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, labels, coeffs)
    }

    /// The basis vector `label` of the given basis.
    pub fn basis_vector(field: ScalarField, labels: &[&str], label: &str) -> Result<Self> {
        let values: Vec<f64> = labels
            .iter()
            .map(|l| if *l == label { 1.0 } else { 0.0 })
            .collect();
        if !labels.contains(&label) {
            return Err(Error::UnknownOutcome(label.to_string()));
        }
        Self::from_reals(field, labels.iter().copied(), &values)
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn coeff(&self, label: &str) -> Option<&Scalar> {
        self.index_of(label).map(|i| &self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Right scalar multiple `Ψ·c`.
    pub fn scale_right(&self, c: &Scalar) -> Result<Self> {
        if c.field() != self.field {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: c.field(),
            });
        }
        Ok(self.map_coeffs(|a| a.mul_same(c)))
    }

    /// `self + other` over the same basis.
    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a + b)
            .collect();
        Ok(StateVector {
            coeffs,
            ..self.clone()
        })
    }

    /// Real multiple of each coefficient.
    pub fn scaled(&self, factor: f64) -> Self {
        self.map_coeffs(|a| a.scale(factor))
    }

    /// Unit vector along this state.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(1.0 / n))
    }

    /// Coordinates in another orthonormal basis, `b_k = ⟨e'_k, Ψ⟩`.
    ///
    /// `new_basis` lists the new basis vectors expressed in the current basis;
    /// they must be orthonormal to within `1e-10`.
    pub fn change_basis<L: Into<String>>(
        &self,
        new_basis: &[StateVector],
        new_labels: impl IntoIterator<Item = L>,
    ) -> Result<Self> {
        if new_basis.len() != self.dim() {
            return Err(Error::BasisMismatch(format!(
                "new basis has {} vectors for a {}-dimensional space",
                new_basis.len(),
                self.dim()
            )));
        }
        for (k, e) in new_basis.iter().enumerate() {
            self.check_compatible(e)?;
            for (m, f) in new_basis.iter().enumerate().skip(k) {
                let g = inner(e, f)?;
                let expected = if k == m { 1.0 } else { 0.0 };
                let off = (g - Scalar::real(expected).embed(self.field)?).norm();
                if off > 1e-10 {
                    return Err(Error::BasisMismatch(format!(
                        "new basis is not orthonormal (Gram entry ({k},{m}) off by {off:e})"
                    )));
                }
            }
        }
        let coeffs = new_basis
            .iter()
            .map(|e| inner(e, self))
            .collect::<Result<Vec<_>>>()?;
        StateVector::new(self.field, new_labels, coeffs)
    }

    fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        StateVector {
            field: self.field,
            labels: self.labels.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn check_compatible(&self, other: &StateVector) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: other.field,
            });
        }
        if self.labels != other.labels {
            return Err(Error::BasisMismatch(format!(
                "[{}] vs [{}]",
                self.labels.join(", "),
                other.labels.join(", ")
            )));
        }
        Ok(())
    }
}

/// `⟨u, v⟩ = Σᵢ conj(uᵢ)·vᵢ`: conjugate-linear in `u`, (right-)linear in `v`.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<Scalar> {
    u.check_compatible(v)?;
    Ok(u.coeffs
        .iter()
        .zip(&v.coeffs)
        .fold(Scalar::zero(u.field), |acc, (a, b)| {
            acc + a.conj().mul_same(b)
        }))
}

pub fn norm_sq(v: &StateVector) -> f64 {
    v.coeffs.iter().map(Scalar::norm_sq).sum()
}

/// Grouping of basis labels into disjoint outcome subspaces `Wᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    try_from = "IndexMap<String, Vec<String>>",
    into = "IndexMap<String, Vec<String>>"
)]
pub struct OrthogonalPartition {
    groups: IndexMap<String, Vec<String>>,
}

impl OrthogonalPartition {
    /// Checks that groups are nonempty and pairwise disjoint. Coverage of a
    /// particular basis is checked by [`OrthogonalPartition::check_basis`].
    pub fn new<O, L, G>(groups: impl IntoIterator<Item = (O, G)>) -> Result<Self>
    where
        O: Into<String>,
        L: Into<String>,
        G: IntoIterator<Item = L>,
    {
        let mut map = IndexMap::new();
        let mut seen = HashSet::new();
        for (outcome, labels) in groups {
            let outcome = outcome.into();
            let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
            if labels.is_empty() {
                return Err(Error::InvalidPartition(format!(
                    "outcome `{outcome}` has no basis labels"
                )));
            }
            for l in &labels {
                if !seen.insert(l.clone()) {
                    return Err(Error::InvalidPartition(format!(
                        "basis label `{l}` appears in more than one outcome"
                    )));
                }
            }
            if map.insert(outcome.clone(), labels).is_some() {
                return Err(Error::InvalidPartition(format!(
                    "duplicate outcome `{outcome}`"
                )));
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidPartition("no outcomes".into()));
        }
        Ok(OrthogonalPartition { groups: map })
    }

    /// One outcome per basis label, named after the label.
    pub fn finest(state: &StateVector) -> Self {
        OrthogonalPartition {
            groups: state
                .labels
                .iter()
                .map(|l| (l.clone(), vec![l.clone()]))
                .collect(),
        }
    }

    /// The trivial partition with a single outcome covering everything.
    pub fn single(outcome: &str, state: &StateVector) -> Self {
        OrthogonalPartition {
            groups: IndexMap::from([(outcome.to_string(), state.labels.clone())]),
        }
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group(&self, outcome: &str) -> Option<&[String]> {
        self.groups.get(outcome).map(Vec::as_slice)
    }

    pub fn groups(&self) -> &IndexMap<String, Vec<String>> {
        &self.groups
    }

    /// Splits `outcome` into two new outcomes; the rest is unchanged.
    pub fn refine(
        &self,
        outcome: &str,
        first: (&str, &[String]),
        second: (&str, &[String]),
    ) -> Result<Self> {
        let group = self
            .group(outcome)
            .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))?;
        let mut union: Vec<&String> = first.1.iter().chain(second.1).collect();
        let mut original: Vec<&String> = group.iter().collect();
        union.sort();
        original.sort();
        if union != original {
            return Err(Error::InvalidPartition(format!(
                "refinement of `{outcome}` must split exactly its basis labels"
            )));
        }
        let mut groups = Vec::with_capacity(self.len() + 1);
        for (name, labels) in &self.groups {
            if name == outcome {
                groups.push((first.0.to_string(), first.1.to_vec()));
                groups.push((second.0.to_string(), second.1.to_vec()));
            } else {
                groups.push((name.clone(), labels.clone()));
            }
        }
        Self::new(groups)
    }

    /// Verifies that the groups cover exactly the basis of `state`.
    pub fn check_basis(&self, state: &StateVector) -> Result<()> {
        let basis: HashSet<&str> = state.labels.iter().map(String::as_str).collect();
        let mut covered = 0;
        for labels in self.groups.values() {
            for l in labels {
                if !basis.contains(l.as_str()) {
                    return Err(Error::InvalidPartition(format!(
                        "basis label `{l}` is not in the state's basis"
                    )));
                }
                covered += 1;
            }
        }
        if covered != basis.len() {
            let missing: Vec<&str> = state
                .labels
                .iter()
                .filter(|l| !self.groups.values().flatten().any(|g| g == *l))
                .map(String::as_str)
                .collect();
            return Err(Error::InvalidPartition(format!(
                "basis labels not covered: {}",
                missing.join(", ")
            )));
        }
        Ok(())
    }
}

impl TryFrom<IndexMap<String, Vec<String>>> for OrthogonalPartition {
    type Error = Error;

    fn try_from(groups: IndexMap<String, Vec<String>>) -> Result<Self> {
        OrthogonalPartition::new(groups)
    }
}

impl From<OrthogonalPartition> for IndexMap<String, Vec<String>> {
    fn from(p: OrthogonalPartition) -> Self {
        p.groups
    }
}

/// `Pᵢ v`: coefficients outside the outcome's basis labels are zeroed.
pub fn project(
    v: &StateVector,
    partition: &OrthogonalPartition,
    outcome: &str,
) -> Result<StateVector> {
    partition.check_basis(v)?;
    let group = partition
        .group(outcome)
        .ok_or_else(|| Error::UnknownOutcome(outcome.to_string()))?;
    let coeffs = v
        .labels
        .iter()
        .zip(&v.coeffs)
        .map(|(l, c)| {
            if group.contains(l) {
                *c
            } else {
                Scalar::zero(v.field)
            }
        })
        .collect();
    Ok(StateVector {
        field: v.field,
        labels: v.labels.clone(),
        coeffs,
    })
}

/// Squared norms `‖Pᵢ v‖²` for every outcome, in partition order.
pub(crate) fn component_norms_sq(
    v: &StateVector,
    partition: &OrthogonalPartition,
) -> Result<Vec<(String, f64)>> {
    partition.check_basis(v)?;
    Ok(partition
        .groups
        .iter()
        .map(|(outcome, labels)| {
            let n = labels
                .iter()
                .map(|l| v.coeff(l).map_or(0.0, Scalar::norm_sq))
                .sum();
            (outcome.clone(), n)
        })
        .collect())
}

/// Joins two basis labels into a product-basis label.
pub fn product_label(a: &str, b: &str) -> String {
    format!("{a}⊗{b}")
}

/// `a ⊗ b` with basis labels `i⊗j`, row-major in `(i, j)`.
///
/// Coefficients are `bⱼ·aᵢ`, so the product is right-linear in `a`: with
/// quaternion scalars acting on the right, `(a·α) ⊗ b = (a ⊗ b)·α`.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    if a.field != b.field {
        return Err(Error::FieldMismatch {
            left: a.field,
            right: b.field,
        });
    }
    let mut labels = Vec::with_capacity(a.dim() * b.dim());
    let mut coeffs = Vec::with_capacity(a.dim() * b.dim());
    for (la, ca) in a.labels.iter().zip(&a.coeffs) {
        for (lb, cb) in b.labels.iter().zip(&b.coeffs) {
            labels.push(product_label(la, lb));
            coeffs.push(cb.mul_same(ca));
        }
    }
    StateVector::new(a.field, labels, coeffs)
}

/// Measurement interaction `Σᵢ cᵢ|i⟩ ↦ Σᵢ cᵢ |i⟩⊗|Dᵢ⟩`.
///
/// Every system basis label needs a pointer state; pointers must share one
/// device basis, be nonzero, and be mutually orthogonal so that the branches
/// are distinguishable. Each branch coefficient is `dᵢⱼ·cᵢ`, keeping the map
/// linear for scalars acting on the right.
pub fn entangle_measure(
    system: &StateVector,
    pointer_states: &IndexMap<String, StateVector>,
) -> Result<StateVector> {
    let pointers = system
        .labels
        .iter()
        .map(|l| {
            pointer_states
                .get(l)
                .map(|p| (l.as_str(), p))
                .ok_or_else(|| Error::MissingPointer(l.clone()))
        })
        .collect::<Result<Vec<_>>>()?;

    let (_, first) = pointers[0];
    for (label, p) in &pointers {
        if p.field != system.field {
            return Err(Error::FieldMismatch {
                left: system.field,
                right: p.field,
            });
        }
        if p.labels != first.labels {
            return Err(Error::BasisMismatch(format!(
                "pointer state for `{label}` uses a different device basis"
            )));
        }
        if p.is_zero() {
            return Err(Error::InvalidState(format!(
                "pointer state for `{label}` is zero"
            )));
        }
    }
    for (k, (la, pa)) in pointers.iter().enumerate() {
        for (lb, pb) in &pointers[k + 1..] {
            let overlap = inner(pa, pb)?.norm();
            if overlap > POINTER_ORTHOGONALITY_TOL * pa.norm() * pb.norm() {
                return Err(Error::NonOrthogonalPointers(la.to_string(), lb.to_string()));
            }
        }
    }

    let mut labels = Vec::with_capacity(system.dim() * first.dim());
    let mut coeffs = Vec::with_capacity(system.dim() * first.dim());
    for ((label, pointer), c) in pointers.iter().zip(&system.coeffs) {
        for (dl, d) in pointer.labels.iter().zip(&pointer.coeffs) {
            labels.push(product_label(label, dl));
            coeffs.push(d.mul_same(c));
        }
    }
    StateVector::new(system.field, labels, coeffs)
}

/// JSON form of a state: `{"field": ..., "basis": [...], "coeffs": [[...], ...]}`.
///
/// An optional `partition` object maps outcome labels to basis labels; without
/// it every basis label is its own outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub field: ScalarField,
    pub basis: Vec<String>,
    pub coeffs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<OrthogonalPartition>,
}

impl StateFile {
    pub fn to_state(&self) -> Result<StateVector> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                Scalar::from_components(self.field, c)
                    .map_err(|e| Error::InvalidState(format!("coeffs[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        StateVector::new(self.field, self.basis.clone(), coeffs)
    }

    /// The state together with its partition (finest if none was given).
    pub fn to_state_and_partition(&self) -> Result<(StateVector, OrthogonalPartition)> {
        let state = self.to_state()?;
        let partition = match &self.partition {
            Some(p) => {
                p.check_basis(&state)?;
                p.clone()
            }
            None => OrthogonalPartition::finest(&state),
        };
        Ok((state, partition))
    }

    pub fn from_state(state: &StateVector) -> Self {
        StateFile {
            field: state.field,
            basis: state.labels.clone(),
            coeffs: state
                .coeffs
                .iter()
                .map(|c| c.components().to_vec())
                .collect(),
            partition: None,
        }
    }
}
