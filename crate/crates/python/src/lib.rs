//! Python bindings for `k3moduli`.

use k3moduli::binary::{automorphism_generators, classes_in_genus as binary_classes, reduce};
use k3moduli::deformation::{build_involution as build, component_label as label_of, hyp_case};
use k3moduli::invariants::min_k;
use k3moduli::moduli::{count_components_with, list_components_with};
use k3moduli::{Equivalence, Error, FormKind, HypTag, IntMatrix};
use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidInvariants(report) => PyValueError::new_err(format!("invalid invariants: {}", report.summary())),
        Error::OddDegree(_) | Error::WrongCase(_) | Error::MissingFlags(..) | Error::InvalidForm(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    m.to_rows()
}

fn tag_of(name: &str) -> PyResult<HypTag> {
    HypTag::ALL
        .into_iter()
        .find(|t| t.name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown case {name:?}")))
}

fn bound_or_default(bound: Option<usize>) -> usize {
    bound.unwrap_or(k3moduli::DEFAULT_GROUP_BOUND)
}

/// Genus invariants `(r, a, δφ, k, n, δP, δφP)`.
#[pyclass(frozen, skip_from_py_object, eq, hash, name = "GenusInvariants")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyInvariants(k3moduli::GenusInvariants);

#[pymethods]
impl PyInvariants {
    #[new]
    #[pyo3(signature = (r, a, delta_phi, n, delta_P, delta_phiP, k=None))]
    #[allow(non_snake_case)]
    fn new(r: u32, a: u32, delta_phi: u8, n: u64, delta_P: u8, delta_phiP: u8, k: Option<u64>) -> Self {
        Self(k3moduli::GenusInvariants::new(
            r,
            a,
            delta_phi,
            k.unwrap_or_else(|| min_k(n)),
            n,
            delta_P,
            delta_phiP,
        ))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("serializable")
    }

    #[getter]
    fn r(&self) -> u32 {
        self.0.r
    }
    #[getter]
    fn a(&self) -> u32 {
        self.0.a
    }
    #[getter]
    fn delta_phi(&self) -> u8 {
        self.0.delta_phi
    }
    #[getter]
    fn k(&self) -> u64 {
        self.0.k
    }
    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }
    #[getter(delta_P)]
    fn delta_p(&self) -> u8 {
        self.0.delta_p
    }
    #[getter(delta_phiP)]
    fn delta_phi_p(&self) -> u8 {
        self.0.delta_phi_p
    }

    /// `(valid, [violated clause ids])`.
    fn validate(&self) -> (bool, Vec<String>) {
        let report = k3moduli::validate_full(&self.0);
        (report.valid, report.violated.into_iter().map(|v| v.id).collect())
    }

    fn __repr__(&self) -> String {
        let i = &self.0;
        format!(
            "GenusInvariants(r={}, a={}, delta_phi={}, n={}, delta_P={}, delta_phiP={}, k={})",
            i.r, i.a, i.delta_phi, i.n, i.delta_p, i.delta_phi_p, i.k
        )
    }
}

/// One connected component of moduli.
#[pyclass(frozen, skip_from_py_object, name = "ComponentDescriptor")]
#[derive(Clone)]
struct PyComponent(k3moduli::ComponentDescriptor);

#[pymethods]
impl PyComponent {
    #[getter]
    fn case_tag(&self) -> String {
        self.0.case_tag.to_string()
    }
    #[getter]
    fn lattice_class(&self) -> Option<String> {
        self.0.lattice_class.as_ref().map(|c| c.to_string())
    }
    #[getter]
    fn label(&self) -> Option<Vec<Vec<u64>>> {
        self.0.label.as_ref().map(|l| l.images().to_vec())
    }
    #[getter]
    fn is_standard(&self) -> bool {
        self.0.is_standard
    }
    #[getter]
    fn is_over2(&self) -> bool {
        self.0.is_over2
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("serializable")
    }

    fn __repr__(&self) -> String {
        format!(
            "ComponentDescriptor({}, {}, standard={}, over2={})",
            self.0.case_tag,
            self.lattice_class().unwrap_or_else(|| "-".into()),
            self.0.is_standard,
            self.0.is_over2
        )
    }
}

/// Indefinite binary form `a x² + b xy + c y²` with Gram `[[2a, b], [b, 2c]]`.
#[pyclass(frozen, skip_from_py_object, eq, name = "BinaryForm")]
#[derive(Clone, PartialEq, Eq)]
struct PyBinaryForm(k3moduli::BinaryForm);

#[pymethods]
impl PyBinaryForm {
    #[new]
    fn new(a: BigInt, b: BigInt, c: BigInt) -> Self {
        Self(k3moduli::BinaryForm::new(a, b, c))
    }

    #[getter]
    fn coefficients(&self) -> (BigInt, BigInt, BigInt) {
        (self.0.a.clone(), self.0.b.clone(), self.0.c.clone())
    }

    fn disc(&self) -> BigInt {
        self.0.disc()
    }

    fn gram(&self) -> Vec<Vec<BigInt>> {
        rows(&self.0.gram())
    }

    /// `(reduced form, transform)` with `f∘T` equal to the reduced form.
    fn reduce(&self) -> PyResult<(PyBinaryForm, Vec<Vec<BigInt>>)> {
        let r = reduce(&self.0).map_err(err)?;
        Ok((PyBinaryForm(r.form), rows(&r.transform)))
    }

    /// Generators of the automorphism group as 2×2 integer matrices.
    fn automorphisms(&self) -> PyResult<Vec<Vec<Vec<BigInt>>>> {
        Ok(automorphism_generators(&self.0).map_err(err)?.iter().map(rows).collect())
    }

    /// Representatives of the improper classes in the genus of this form.
    #[pyo3(signature = (group_bound=None))]
    fn classes_in_genus(&self, group_bound: Option<usize>) -> PyResult<Vec<PyBinaryForm>> {
        let l = self.0.lattice().map_err(err)?;
        Ok(binary_classes(&l, Equivalence::Improper, bound_or_default(group_bound))
            .map_err(err)?
            .into_iter()
            .map(|c| PyBinaryForm(c.representative))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("BinaryForm{}", self.0)
    }
}

/// Finite quadratic or bilinear form.
#[pyclass(frozen, skip_from_py_object, eq, name = "FiniteForm")]
#[derive(Clone, PartialEq, Eq)]
struct PyFiniteForm(k3moduli::FiniteForm);

#[pymethods]
impl PyFiniteForm {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(json_err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("serializable")
    }

    #[getter]
    fn orders(&self) -> Vec<u64> {
        self.0.group().orders().to_vec()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.kind() {
            FormKind::Quadratic => "quadratic",
            FormKind::Bilinear => "bilinear",
        }
    }

    fn order(&self) -> u128 {
        self.0.order()
    }

    fn negate(&self) -> Self {
        Self(self.0.negate())
    }

    fn direct_sum(&self, other: &PyFiniteForm) -> PyResult<Self> {
        self.0.direct_sum(&other.0).map(Self).map_err(err)
    }

    fn p_component(&self, p: u64) -> Self {
        Self(self.0.p_component(p))
    }

    /// Elements of the orthogonal group as generator images, identity first.
    #[pyo3(signature = (group_bound=None))]
    fn orthogonal_group(&self, group_bound: Option<usize>) -> PyResult<Vec<Vec<Vec<u64>>>> {
        Ok(self
            .0
            .orthogonal_group(bound_or_default(group_bound))
            .map_err(err)?
            .iter()
            .map(|g| g.images().to_vec())
            .collect())
    }

    #[pyo3(signature = (other, group_bound=None))]
    fn is_isometric(&self, other: &PyFiniteForm, group_bound: Option<usize>) -> PyResult<bool> {
        Ok(self
            .0
            .find_isometry(&other.0, bound_or_default(group_bound))
            .map_err(err)?
            .is_some())
    }

    fn __repr__(&self) -> String {
        format!("FiniteForm({})", self.to_json())
    }
}

/// Even nondegenerate lattice given by its Gram matrix.
#[pyclass(frozen, skip_from_py_object, name = "EvenLattice")]
#[derive(Clone)]
struct PyEvenLattice(k3moduli::EvenLattice);

#[pymethods]
impl PyEvenLattice {
    #[new]
    fn new(gram: Vec<Vec<BigInt>>) -> PyResult<Self> {
        let m = IntMatrix::from_rows(&gram).map_err(err)?;
        k3moduli::EvenLattice::new(m).map(Self).map_err(err)
    }

    fn gram(&self) -> Vec<Vec<BigInt>> {
        rows(self.0.gram())
    }

    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn det(&self) -> BigInt {
        self.0.det().clone()
    }

    fn signature(&self) -> (usize, usize) {
        self.0.signature()
    }

    fn discriminant_form(&self) -> PyFiniteForm {
        PyFiniteForm(self.0.discriminant_form().form)
    }

    fn orthogonal_sum(&self, other: &PyEvenLattice) -> Self {
        Self(self.0.orthogonal_sum(&other.0))
    }
}

/// Polarized involution built for a hyper-elliptic case.
#[pyclass(frozen, skip_from_py_object, name = "PolarizedInvolution")]
struct PyInvolution(k3moduli::PolarizedInvolution);

#[pymethods]
impl PyInvolution {
    #[getter]
    fn case(&self) -> &'static str {
        self.0.case.name()
    }
    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }
    #[getter]
    fn invariants(&self) -> PyInvariants {
        PyInvariants(self.0.invariants)
    }
    #[getter]
    fn generator_names(&self) -> Vec<String> {
        self.0.generator_names.clone()
    }
    #[getter]
    fn phi_signs(&self) -> Vec<i8> {
        self.0.phi_signs.clone()
    }
    /// Gram matrix of `L` in its computed basis.
    fn lattice_gram(&self) -> Vec<Vec<BigInt>> {
        rows(self.0.lattice.gram())
    }
    fn fixed_lattice_gram(&self) -> Vec<Vec<BigInt>> {
        rows(self.0.fixed_lattice.gram())
    }
    /// `(statement, holds)` for every membership check of the construction.
    fn checks(&self) -> Vec<(String, bool)> {
        self.0.checks.iter().map(|c| (c.statement.clone(), c.holds)).collect()
    }
}

#[pyfunction]
fn enumerate_rad() -> Vec<(u32, u32, u8)> {
    k3moduli::enumerate_rad()
}

#[pyfunction]
fn enumerate_full(n: u64) -> PyResult<Vec<PyInvariants>> {
    Ok(k3moduli::enumerate_full(n).map_err(err)?.into_iter().map(PyInvariants).collect())
}

/// `(valid, [(id, text)])`.
#[pyfunction]
fn validate_full(inv: &PyInvariants) -> (bool, Vec<(String, String)>) {
    let report = k3moduli::validate_full(&inv.0);
    (report.valid, report.violated.into_iter().map(|v| (v.id, v.text)).collect())
}

#[pyfunction]
fn validate_rad(r: u32, a: u32, delta_phi: u8) -> bool {
    k3moduli::validate_rad(r, a, delta_phi).valid
}

#[pyfunction]
#[pyo3(signature = (inv, group_bound=None))]
fn count_components(inv: &PyInvariants, group_bound: Option<usize>) -> PyResult<usize> {
    Ok(count_components_with(&inv.0, bound_or_default(group_bound)).map_err(err)?.total)
}

#[pyfunction]
#[pyo3(signature = (inv, group_bound=None))]
fn list_components(inv: &PyInvariants, group_bound: Option<usize>) -> PyResult<Vec<PyComponent>> {
    Ok(list_components_with(&inv.0, bound_or_default(group_bound))
        .map_err(err)?
        .into_iter()
        .map(PyComponent)
        .collect())
}

#[pyfunction]
fn over2_component_bound(inv: &PyInvariants) -> PyResult<usize> {
    k3moduli::over2_component_bound(&inv.0).map_err(err)
}

#[pyfunction]
fn genus_deformable(inv: &PyInvariants) -> PyResult<bool> {
    k3moduli::genus_deformable(&inv.0).map_err(err)
}

/// `(deformable, clause, witness case or None)`.
#[pyfunction]
#[pyo3(signature = (inv, standard=None, over2=None))]
fn is_deformation_of_hyperelliptic(
    inv: &PyInvariants,
    standard: Option<bool>,
    over2: Option<bool>,
) -> PyResult<(bool, String, Option<String>)> {
    let flags = match (standard, over2) {
        (None, None) => None,
        (s, o) => {
            let standard = s.unwrap_or(false);
            Some(k3moduli::ComponentFlags {
                standard,
                over2: o.unwrap_or(standard),
            })
        }
    };
    let v = k3moduli::is_deformation_of_hyperelliptic(&inv.0, flags).map_err(err)?;
    Ok((v.deformable, v.clause.to_string(), v.witness_case.map(|t| t.name().to_string())))
}

/// Hyper-elliptic cases at degree `n` as JSON rows.
#[pyfunction]
fn case_table(n: u64) -> PyResult<String> {
    let table = k3moduli::case_table(n).map_err(err)?;
    Ok(serde_json::to_string(&table).expect("serializable"))
}

#[pyfunction]
fn build_involution(case: &str, n: u64) -> PyResult<PyInvolution> {
    let tag = tag_of(case)?;
    hyp_case(tag, n).map_err(err)?;
    build(tag, n).map(PyInvolution).map_err(err)
}

#[pyfunction]
fn component_label(case: &str, n: u64) -> PyResult<PyComponent> {
    label_of(tag_of(case)?, n).map(PyComponent).map_err(err)
}

#[pymodule]
fn pyk3moduli(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyInvariants>()?;
    m.add_class::<PyComponent>()?;
    m.add_class::<PyBinaryForm>()?;
    m.add_class::<PyFiniteForm>()?;
    m.add_class::<PyEvenLattice>()?;
    m.add_class::<PyInvolution>()?;
    m.add_function(wrap_pyfunction!(enumerate_rad, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_full, m)?)?;
    m.add_function(wrap_pyfunction!(validate_full, m)?)?;
    m.add_function(wrap_pyfunction!(validate_rad, m)?)?;
    m.add_function(wrap_pyfunction!(count_components, m)?)?;
    m.add_function(wrap_pyfunction!(list_components, m)?)?;
    m.add_function(wrap_pyfunction!(over2_component_bound, m)?)?;
    m.add_function(wrap_pyfunction!(genus_deformable, m)?)?;
    m.add_function(wrap_pyfunction!(is_deformation_of_hyperelliptic, m)?)?;
    m.add_function(wrap_pyfunction!(case_table, m)?)?;
    m.add_function(wrap_pyfunction!(build_involution, m)?)?;
    m.add_function(wrap_pyfunction!(component_label, m)?)?;
    Ok(())
}
