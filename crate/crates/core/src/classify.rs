//! Isomorphism, isotopy and S3 classification of right-primitive semifields.
//!
//! A semifield is right primitive when some `y` has a right multiplication
//! map `R_y` with primitive characteristic polynomial. Rewriting the
//! multiplication in the basis `(e, y, y·y, (y·y)·y, …)` yields a standard
//! set whose second matrix is a companion matrix, exactly the normal form
//! produced by the search. Those rewritten code tuples are the cyclic
//! representations; their lexicographic minimum is the [`CanonicalKey`].
//!
//! Automorphisms act freely on the qualifying `y` and preserve the rewritten
//! tuple, so the number of `y` reaching the minimum equals `|Aut|`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{sigma_transform, unitalize, Algebra, Element, PermS3, StandardSet};
use crate::error::{Error, Result};
use crate::gf::{FieldSpec, MatrixGF, PolyGF, VectorGF};

/// Primitive-polynomial lookup, indexed by [`PolyGF::index`].
struct FieldTables {
    primitive: Vec<bool>,
    companion_code: Vec<u64>,
}

fn field_tables(spec: FieldSpec) -> Arc<FieldTables> {
    static CACHE: OnceLock<Mutex<HashMap<FieldSpec, Arc<FieldTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("field table cache poisoned");
    guard
        .entry(spec)
        .or_insert_with(|| {
            let polys: Vec<PolyGF> = (0..spec.order())
                .map(|i| PolyGF::from_index(spec, i))
                .collect();
            Arc::new(FieldTables {
                primitive: polys.iter().map(PolyGF::is_primitive).collect(),
                companion_code: polys.iter().map(|f| f.companion().code_value()).collect(),
            })
        })
        .clone()
}

/// Lexicographically smallest cyclic representation `(a2, …, ad)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey {
    codes: Vec<u64>,
}

impl CanonicalKey {
    pub fn from_codes(codes: Vec<u64>) -> Self {
        CanonicalKey { codes }
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn to_standard_set(&self, spec: FieldSpec) -> Result<StandardSet> {
        StandardSet::from_codes(spec, &self.codes)
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.codes.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A nonnegative reduced fraction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fraction {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Fraction {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

}

impl std::ops::Add for Fraction {
    type Output = Fraction;

    fn add(self, other: Fraction) -> Fraction {
        let l = self.den / gcd(self.den, other.den) * other.den;
        Fraction::new(self.num * (l / self.den) + other.num * (l / other.den), l)
    }
}

impl std::str::FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad fraction {s:?}"));
        let (n, d) = s.trim().split_once('/').ok_or_else(bad)?;
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Fraction::new(n, d))
    }
}

impl fmt::Debug for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoClassRecord {
    pub key: CanonicalKey,
    pub aut_order: u64,
    pub commutative: bool,
}

/// Classes of the principal isotopes of one semifield.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotopeInventory {
    pub classes: Vec<IsoClassRecord>,
    pub sa_sum: Fraction,
}

impl IsotopeInventory {
    /// Number of isomorphism classes per automorphism group order.
    pub fn counts_by_aut(&self) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for c in &self.classes {
            *out.entry(c.aut_order).or_insert(0) += 1;
        }
        out
    }

    pub fn is_commutative(&self) -> bool {
        self.classes.iter().any(|c| c.commutative)
    }
}

/// Whether the transposed planes are isotopic to the original one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaFlags {
    /// (1,2)-isotopic.
    pub self_dual: bool,
    /// (1,3)-isotopic.
    pub self_transpose: bool,
    /// (2,3)-isotopic.
    pub iso_23: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitStructure {
    pub orbit_size: usize,
    pub flags: SigmaFlags,
    /// For each σ in [`PermS3::all`] order, the index (in order of first
    /// appearance) of the isotopy class of the σ-transformed semifield.
    pub partition: [usize; 6],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneClassRecord {
    pub representative: CanonicalKey,
    pub representative_aut: u64,
    pub at_order: u64,
    pub sa_sum: Fraction,
    /// automorphism group order → number of isomorphism classes
    pub inventory: BTreeMap<u64, u64>,
    pub s3_orbit_size: usize,
    pub sigma_flags: SigmaFlags,
    pub commutative: bool,
}

/// Renders an inventory as `count/aut` terms joined by `sep`, e.g. `12/1+2/4`.
pub fn format_inventory(inventory: &BTreeMap<u64, u64>, sep: &str) -> String {
    let terms: Vec<String> = inventory
        .iter()
        .map(|(aut, n)| format!("{n}/{aut}"))
        .collect();
    terms.join(sep)
}

/// Inverse of [`format_inventory`] for any separator made of `+` and spaces.
pub fn parse_inventory(text: &str) -> Result<BTreeMap<u64, u64>> {
    let bad = || Error::Parse(format!("bad inventory {text:?}"));
    let mut out = BTreeMap::new();
    for term in text.split('+') {
        let (n, aut) = term.trim().split_once('/').ok_or_else(bad)?;
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let aut: u64 = aut.trim().parse().map_err(|_| bad())?;
        if aut == 0 || out.insert(aut, n).is_some() {
            return Err(bad());
        }
    }
    Ok(out)
}

struct Scan {
    key: CanonicalKey,
    multiplicity: u64,
}

/// Matrices `P` (columns: the right powers of `y` starting at `e`) and `R_y`.
fn right_powers(alg: &Algebra, identity: &Element, ry: &MatrixGF) -> MatrixGF {
    let spec = alg.spec();
    let mut cols = Vec::with_capacity(spec.d());
    let mut b = *identity;
    for _ in 0..spec.d() {
        cols.push(b);
        b = ry.mul_vec(&b);
    }
    MatrixGF::from_columns(spec, &cols)
}

/// Code tuple of the algebra rewritten in the basis given by the columns of `p`.
fn rebased_codes(alg: &Algebra, p: &MatrixGF, p_inv: &MatrixGF, out: &mut Vec<u64>) {
    out.clear();
    for j in 1..alg.spec().d() {
        let m = p_inv.mul(&alg.right_mul(&p.column(j))).mul(p);
        out.push(m.code_value());
    }
}

fn scan(alg: &Algebra, identity: &Element, tables: &FieldTables) -> Result<Scan> {
    let spec = alg.spec();
    let mut best_a2 = u64::MAX;
    let mut candidates: Vec<(Element, MatrixGF)> = Vec::new();
    for u in spec.nonzero_vectors() {
        let ru = alg.right_mul(&u);
        let idx = ru.char_poly().index() as usize;
        if !tables.primitive[idx] {
            continue;
        }
        let code = tables.companion_code[idx];
        if code < best_a2 {
            best_a2 = code;
            candidates.clear();
        }
        if code == best_a2 {
            candidates.push((u, ru));
        }
    }
    if candidates.is_empty() {
        return Err(Error::NotRightPrimitive);
    }
    let mut best: Vec<u64> = Vec::new();
    let mut multiplicity = 0;
    let mut codes = Vec::new();
    for (_, ru) in &candidates {
        let p = right_powers(alg, identity, ru);
        let Ok(p_inv) = p.inverse() else { continue };
        rebased_codes(alg, &p, &p_inv, &mut codes);
        debug_assert_eq!(codes[0], best_a2);
        if best.is_empty() || codes < best {
            std::mem::swap(&mut best, &mut codes);
            multiplicity = 1;
        } else if codes == best {
            multiplicity += 1;
        }
    }
    if best.is_empty() {
        return Err(Error::NotRightPrimitive);
    }
    Ok(Scan {
        key: CanonicalKey { codes: best },
        multiplicity,
    })
}

/// The basis `(e, y, y·y, …)` of right powers, if it is linearly
/// independent and `R_y` has a primitive characteristic polynomial.
pub fn right_power_basis(set: &StandardSet, y: &Element) -> Option<Vec<Element>> {
    if y.is_zero() {
        return None;
    }
    let ry = set.algebra().right_mul(y);
    if !ry.char_poly().is_primitive() {
        return None;
    }
    let p = right_powers(set.algebra(), &set.identity(), &ry);
    p.is_invertible().then(|| p.columns())
}

/// Every code tuple `(a2, …, ad)` obtained by rewriting `set` in a basis of
/// right powers of a qualifying element.
pub fn cyclic_representations(set: &StandardSet) -> Result<BTreeSet<Vec<u64>>> {
    let spec = set.spec();
    let mut out = BTreeSet::new();
    let mut codes = Vec::new();
    for y in spec.nonzero_vectors() {
        let Some(basis) = right_power_basis(set, &y) else {
            continue;
        };
        let p = MatrixGF::from_columns(spec, &basis);
        let p_inv = p.inverse()?;
        rebased_codes(set.algebra(), &p, &p_inv, &mut codes);
        out.insert(codes.clone());
    }
    if out.is_empty() {
        return Err(Error::NotRightPrimitive);
    }
    Ok(out)
}

pub fn canonical_key(set: &StandardSet) -> Result<CanonicalKey> {
    let tables = field_tables(set.spec());
    Ok(scan(set.algebra(), &set.identity(), &tables)?.key)
}

/// Canonical key together with `|Aut|` read off the key's multiplicity.
pub fn canonical_key_with_aut(set: &StandardSet) -> Result<(CanonicalKey, u64)> {
    let tables = field_tables(set.spec());
    let s = scan(set.algebra(), &set.identity(), &tables)?;
    Ok((s.key, s.multiplicity))
}

/// Counts automorphisms directly: fix the first qualifying `y`, try every
/// `z` with the same characteristic polynomial as its image, and check the
/// induced linear map on all basis products.
pub fn aut_order(set: &StandardSet) -> Result<u64> {
    let spec = set.spec();
    let alg = set.algebra();
    let e = set.identity();
    let (y, basis) = spec
        .nonzero_vectors()
        .find_map(|y| right_power_basis(set, &y).map(|b| (y, b)))
        .ok_or(Error::NotRightPrimitive)?;
    let p_inv = MatrixGF::from_columns(spec, &basis).inverse()?;
    let target = alg.right_mul(&y).char_poly();
    let units: Vec<Element> = (0..spec.d()).map(|i| VectorGF::unit(spec, i)).collect();
    let mut count = 0;
    for z in spec.nonzero_vectors() {
        let rz = alg.right_mul(&z);
        if rz.char_poly() != target {
            continue;
        }
        let q = right_powers(alg, &e, &rz);
        if !q.is_invertible() {
            continue;
        }
        let f = q.mul(&p_inv);
        let multiplicative = units.iter().all(|a| {
            units
                .iter()
                .all(|b| f.mul_vec(&alg.mul(a, b)) == alg.mul(&f.mul_vec(a), &f.mul_vec(b)))
        });
        if multiplicative {
            count += 1;
        }
    }
    Ok(count)
}

/// Classifies all `(p^d − 1)²` principal isotopes by canonical key.
pub fn isotope_inventory(set: &StandardSet) -> Result<IsotopeInventory> {
    let spec = set.spec();
    let tables = field_tables(spec);
    let alg = set.algebra();
    let nonzero: Vec<Element> = spec.nonzero_vectors().collect();
    let rz_inv: Vec<MatrixGF> = nonzero
        .iter()
        .map(|z| alg.right_mul(z).inverse())
        .collect::<Result<_>>()?;
    let ly_inv: Vec<MatrixGF> = nonzero
        .iter()
        .map(|y| alg.left_mul(y).inverse())
        .collect::<Result<_>>()?;

    let rows: Vec<Vec<(CanonicalKey, u64, bool)>> = (0..nonzero.len())
        .into_par_iter()
        .map(|yi| {
            (0..nonzero.len())
                .map(|zi| {
                    let iso = alg.isotope_with_inverses(&ly_inv[yi], &rz_inv[zi]);
                    let identity = alg.mul(&nonzero[yi], &nonzero[zi]);
                    let s = scan(&iso, &identity, &tables)?;
                    Ok((s.key, s.multiplicity, iso.is_commutative()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut classes: BTreeMap<CanonicalKey, IsoClassRecord> = BTreeMap::new();
    for (key, aut_order, commutative) in rows.into_iter().flatten() {
        let rec = classes.entry(key.clone()).or_insert(IsoClassRecord {
            key,
            aut_order,
            commutative,
        });
        debug_assert_eq!(rec.aut_order, aut_order);
    }
    let classes: Vec<IsoClassRecord> = classes.into_values().collect();
    let sa_sum = classes.iter().fold(Fraction::ZERO, |acc, c| {
        acc + Fraction::new(1, c.aut_order)
    });
    Ok(IsotopeInventory { classes, sa_sum })
}

/// `(p^d − 1)² / S/A`, required to be an integer.
pub fn at_order_from_sum(spec: FieldSpec, sa_sum: Fraction) -> Result<u64> {
    let n = spec.order() - 1;
    let total = n * n * sa_sum.denominator();
    if sa_sum.numerator() == 0 || !total.is_multiple_of(sa_sum.numerator()) {
        return Err(Error::NonIntegerAtOrder {
            num: sa_sum.numerator(),
            den: sa_sum.denominator(),
        });
    }
    Ok(total / sa_sum.numerator())
}

pub fn at_order(set: &StandardSet) -> Result<u64> {
    at_order_from_sum(set.spec(), isotope_inventory(set)?.sa_sum)
}

/// Deduplicates a stream of semifields by canonical key. Output is sorted
/// by key.
pub fn isomorphism_classes<I>(sets: I) -> Result<Vec<IsoClassRecord>>
where
    I: IntoIterator<Item = StandardSet>,
{
    let sets: Vec<StandardSet> = sets.into_iter().collect();
    let keyed: Vec<IsoClassRecord> = sets
        .par_iter()
        .map(|s| {
            let (key, aut_order) = canonical_key_with_aut(s)?;
            Ok(IsoClassRecord {
                key,
                aut_order,
                commutative: s.algebra().is_commutative(),
            })
        })
        .collect::<Result<_>>()?;
    let mut by_key: BTreeMap<CanonicalKey, IsoClassRecord> = BTreeMap::new();
    for rec in keyed {
        by_key.entry(rec.key.clone()).or_insert(rec);
    }
    Ok(by_key.into_values().collect())
}

struct IsotopyClass {
    inventory: IsotopeInventory,
    at_order: u64,
}

/// Isotopy classes discovered so far, each stored as the set of canonical
/// keys of its principal isotopes. Class ids are assigned in discovery order.
pub struct PlaneClassifier {
    spec: FieldSpec,
    class_of: HashMap<CanonicalKey, usize>,
    classes: Vec<IsotopyClass>,
}

impl PlaneClassifier {
    pub fn new(spec: FieldSpec) -> Self {
        PlaneClassifier {
            spec,
            class_of: HashMap::new(),
            classes: Vec::new(),
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn lookup(&self, key: &CanonicalKey) -> Option<usize> {
        self.class_of.get(key).copied()
    }

    pub fn inventory(&self, id: usize) -> &IsotopeInventory {
        &self.classes[id].inventory
    }

    pub fn at_order(&self, id: usize) -> u64 {
        self.classes[id].at_order
    }

    /// Class id of `set`, expanding its principal isotopes when unseen.
    pub fn isotopy_class(&mut self, set: &StandardSet) -> Result<usize> {
        let key = canonical_key(set)?;
        if let Some(id) = self.lookup(&key) {
            return Ok(id);
        }
        let inventory = isotope_inventory(set)?;
        let at_order = at_order_from_sum(self.spec, inventory.sa_sum)?;
        let id = self.classes.len();
        for c in &inventory.classes {
            let previous = self.class_of.insert(c.key.clone(), id);
            debug_assert!(previous.is_none(), "isotopy classes overlap");
        }
        debug_assert_eq!(self.lookup(&key), Some(id));
        self.classes.push(IsotopyClass {
            inventory,
            at_order,
        });
        Ok(id)
    }

    /// Class ids of the six σ-transforms of `set`, in [`PermS3::all`] order.
    pub fn sigma_classes(&mut self, set: &StandardSet) -> Result<[usize; 6]> {
        let cube = set.cube();
        let u = set.identity();
        let mut ids = [0; 6];
        for (slot, sigma) in ids.iter_mut().zip(PermS3::all()) {
            *slot = if sigma == PermS3::IDENTITY {
                self.isotopy_class(set)?
            } else {
                self.isotopy_class(&unitalize(&sigma_transform(&cube, sigma), &u)?)?
            };
        }
        Ok(ids)
    }

    pub fn orbit(&mut self, set: &StandardSet) -> Result<OrbitStructure> {
        Ok(orbit_from_ids(self.sigma_classes(set)?))
    }

    /// Full record for the plane coordinatized by `set`, with `set`'s own
    /// canonical key as representative.
    pub fn plane_record(&mut self, set: &StandardSet) -> Result<PlaneClassRecord> {
        let key = canonical_key(set)?;
        let ids = self.sigma_classes(set)?;
        let commutative = self.classes[ids[0]].inventory.is_commutative();
        Ok(self.record(&key, &ids, commutative))
    }

    fn record(&self, rep: &CanonicalKey, ids: &[usize; 6], commutative: bool) -> PlaneClassRecord {
        let class = &self.classes[ids[0]];
        let orbit = orbit_from_ids(*ids);
        let representative_aut = class
            .inventory
            .classes
            .iter()
            .find(|c| &c.key == rep)
            .map(|c| c.aut_order)
            .expect("representative missing from its own inventory");
        PlaneClassRecord {
            representative: rep.clone(),
            representative_aut,
            at_order: class.at_order,
            sa_sum: class.inventory.sa_sum,
            inventory: class.inventory.counts_by_aut(),
            s3_orbit_size: orbit.orbit_size,
            sigma_flags: orbit.flags,
            commutative,
        }
    }

    /// Sweeps `reps` in canonical-key order; each representative not yet
    /// covered opens a new class. Returns each record with the isotopy class
    /// ids of its six σ-transforms.
    pub fn sweep(
        &mut self,
        reps: &[StandardSet],
        mode: SweepMode,
    ) -> Result<Vec<(PlaneClassRecord, [usize; 6])>> {
        let mut covered: HashSet<usize> = HashSet::new();
        let mut opened: Vec<(CanonicalKey, StandardSet)> = Vec::new();
        let mut out = Vec::new();
        for (key, set) in sorted_by_key(reps)? {
            if self.lookup(&key).is_some_and(|id| covered.contains(&id)) {
                continue;
            }
            match mode {
                SweepMode::Isotopy => {
                    covered.insert(self.isotopy_class(&set)?);
                    opened.push((key, set));
                }
                SweepMode::S3 => {
                    let ids = self.sigma_classes(&set)?;
                    covered.extend(ids);
                    let commutative = ids
                        .iter()
                        .any(|&id| self.classes[id].inventory.is_commutative());
                    out.push((self.record(&key, &ids, commutative), ids));
                }
            }
        }
        // Orbits are resolved only after the sweep so that isotopy classes
        // reached through σ-transforms never influence which classes open.
        for (key, set) in opened {
            let ids = self.sigma_classes(&set)?;
            let commutative = self.classes[ids[0]].inventory.is_commutative();
            out.push((self.record(&key, &ids, commutative), ids));
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Isotopy,
    S3,
}

fn orbit_from_ids(ids: [usize; 6]) -> OrbitStructure {
    let mut order: Vec<usize> = Vec::new();
    let mut partition = [0; 6];
    for (slot, id) in partition.iter_mut().zip(ids) {
        *slot = match order.iter().position(|&x| x == id) {
            Some(pos) => pos,
            None => {
                order.push(id);
                order.len() - 1
            }
        };
    }
    let flags = SigmaFlags {
        self_dual: ids[1] == ids[0],
        self_transpose: ids[2] == ids[0],
        iso_23: ids[3] == ids[0],
    };
    OrbitStructure {
        orbit_size: order.len(),
        flags,
        partition,
    }
}

/// Partition of the six σ-transforms of `set` into isotopy classes.
pub fn s3_orbit_structure(set: &StandardSet) -> Result<OrbitStructure> {
    PlaneClassifier::new(set.spec()).orbit(set)
}

fn sorted_by_key(reps: &[StandardSet]) -> Result<Vec<(CanonicalKey, StandardSet)>> {
    let mut keyed: Vec<(CanonicalKey, StandardSet)> = reps
        .par_iter()
        .map(|s| Ok((canonical_key(s)?, s.clone())))
        .collect::<Result<_>>()?;
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(keyed)
}

/// One record per isotopy class met by `reps`, opened in canonical-key order.
pub fn isotopy_classes(reps: &[StandardSet]) -> Result<Vec<PlaneClassRecord>> {
    classify_planes(reps, SweepMode::Isotopy)
}

/// Like [`isotopy_classes`], but a new class also covers the isotopy
/// classes of all six σ-transforms of its representative.
pub fn s3_classes(reps: &[StandardSet]) -> Result<Vec<PlaneClassRecord>> {
    classify_planes(reps, SweepMode::S3)
}

fn classify_planes(reps: &[StandardSet], mode: SweepMode) -> Result<Vec<PlaneClassRecord>> {
    let Some(spec) = reps.first().map(StandardSet::spec) else {
        return Ok(Vec::new());
    };
    let records = PlaneClassifier::new(spec).sweep(reps, mode)?;
    Ok(records.into_iter().map(|(rec, _)| rec).collect())
}
