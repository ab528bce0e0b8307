//! BLS12-381 group arithmetic, the KZG setup and single-point openings.

use std::fmt;

use ark_ec::scalar_mul::BatchMulPreprocessing;
use ark_ec::{pairing::Pairing, AffineRepr, CurveGroup, PrimeGroup, VariableBaseMSM};
use ark_ff::{BigInteger, Field, One, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use sha2::{Digest, Sha256};

use crate::codec::Reader;
use crate::error::{FormatError, Result, VcError};
use crate::poly::{barycentric_denominator, DensePolynomial};

pub use ark_bls12_381::{Bls12_381, Fr as Scalar, G1Affine, G1Projective, G2Affine, G2Projective};

pub type GtElement = ark_ec::pairing::PairingOutput<Bls12_381>;

pub const G1_BYTES: usize = 48;
pub const G2_BYTES: usize = 96;
pub const SCALAR_BYTES: usize = 32;

const SRS_MAGIC: &str = "SVCSRS01";

pub fn g1_generator() -> G1Projective {
    G1Projective::generator()
}

pub fn g2_generator() -> G2Projective {
    G2Projective::generator()
}

pub fn g1_to_bytes(p: &G1Projective) -> [u8; G1_BYTES] {
    let mut out = [0u8; G1_BYTES];
    p.into_affine().serialize_compressed(&mut out[..]).expect("fixed-size buffer");
    out
}

/// Decodes a compressed point, rejecting anything off the curve or
/// outside the prime-order subgroup.
pub fn g1_from_bytes(bytes: &[u8]) -> Result<G1Projective, FormatError> {
    if bytes.len() != G1_BYTES {
        return Err(FormatError::InvalidPoint);
    }
    G1Affine::deserialize_compressed(bytes).map(Into::into).map_err(|_| FormatError::InvalidPoint)
}

pub fn g2_to_bytes(p: &G2Affine) -> [u8; G2_BYTES] {
    let mut out = [0u8; G2_BYTES];
    p.serialize_compressed(&mut out[..]).expect("fixed-size buffer");
    out
}

pub fn g2_from_bytes(bytes: &[u8]) -> Result<G2Affine, FormatError> {
    if bytes.len() != G2_BYTES {
        return Err(FormatError::InvalidPoint);
    }
    G2Affine::deserialize_compressed(bytes).map_err(|_| FormatError::InvalidPoint)
}

/// Little-endian canonical encoding.
pub fn scalar_to_bytes(s: &Scalar) -> [u8; SCALAR_BYTES] {
    let mut out = [0u8; SCALAR_BYTES];
    out.copy_from_slice(&s.into_bigint().to_bytes_le());
    out
}

pub fn scalar_from_bytes(bytes: &[u8]) -> Result<Scalar, FormatError> {
    if bytes.len() != SCALAR_BYTES {
        return Err(FormatError::InvalidScalar);
    }
    let s = Scalar::from_le_bytes_mod_order(bytes);
    if scalar_to_bytes(&s) != bytes {
        return Err(FormatError::InvalidScalar);
    }
    Ok(s)
}

/// SHA-256 over a domain tag and length-prefixed parts, reduced mod the
/// group order.
pub fn hash_to_scalar(domain: &[u8], parts: &[&[u8]]) -> Scalar {
    let mut h = Sha256::new();
    h.update((domain.len() as u32).to_le_bytes());
    h.update(domain);
    for p in parts {
        h.update((p.len() as u32).to_le_bytes());
        h.update(p);
    }
    let digest: [u8; 32] = h.finalize().into();
    Scalar::from_le_bytes_mod_order(&digest)
}

/// The setup secret. Derived deterministically from a seed so that
/// independent keygen routines agree on it, then dropped.
#[derive(Clone, Copy)]
pub(crate) struct Trapdoor(pub(crate) Scalar);

impl Trapdoor {
    pub(crate) fn from_seed(seed: &[u8]) -> Self {
        let mut counter = 0u32;
        loop {
            let tau = hash_to_scalar(b"svc/setup/tau", &[seed, &counter.to_le_bytes()]);
            // Reject values that could land inside an evaluation domain.
            let small = tau.into_bigint().as_ref()[1..].iter().all(|l| *l == 0);
            if !small {
                return Self(tau);
            }
            counter += 1;
        }
    }

    pub(crate) fn powers(&self, n: usize) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(n);
        let mut cur = Scalar::one();
        for _ in 0..n {
            out.push(cur);
            cur *= self.0;
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SetupOptions {
    /// Number of G2 powers `g2^(tau^j)` to publish; at least 2.
    pub g2_powers: usize,
    /// Keep tau inside the returned SRS. Testing only.
    pub insecure_retain_trapdoor: bool,
}

impl Default for SetupOptions {
    fn default() -> Self {
        Self { g2_powers: 2, insecure_retain_trapdoor: false }
    }
}

/// Structured reference string `(g^(tau^j))_{j<=l}` and `(g2^(tau^j))`.
#[derive(Clone, PartialEq, Eq)]
pub struct Srs {
    g1_powers: Vec<G1Affine>,
    g2_powers: Vec<G2Affine>,
    trapdoor: Option<Scalar>,
}

impl fmt::Debug for Srs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Srs")
            .field("degree_bound", &self.degree_bound())
            .field("g2_powers", &self.g2_powers.len())
            .field("trapdoor_retained", &self.trapdoor.is_some())
            .finish()
    }
}

pub fn trusted_setup(degree_bound: usize, seed: &[u8]) -> Result<Srs> {
    trusted_setup_with(degree_bound, seed, SetupOptions::default())
}

pub fn trusted_setup_with(degree_bound: usize, seed: &[u8], opts: SetupOptions) -> Result<Srs> {
    if degree_bound == 0 {
        return Err(VcError::InvalidParameter("degree bound must be positive".into()));
    }
    if opts.g2_powers < 2 {
        return Err(VcError::InvalidParameter("at least two G2 powers are required".into()));
    }
    let tau = Trapdoor::from_seed(seed);
    let g1_powers = fixed_base_g1(&tau.powers(degree_bound + 1));
    let g2_powers = fixed_base_g2(&tau.powers(opts.g2_powers));
    Ok(Srs { g1_powers, g2_powers, trapdoor: opts.insecure_retain_trapdoor.then_some(tau.0) })
}

pub(crate) fn fixed_base_g1(scalars: &[Scalar]) -> Vec<G1Affine> {
    if scalars.is_empty() {
        return Vec::new();
    }
    BatchMulPreprocessing::new(g1_generator(), scalars.len()).batch_mul(scalars)
}

pub(crate) fn fixed_base_g2(scalars: &[Scalar]) -> Vec<G2Affine> {
    if scalars.is_empty() {
        return Vec::new();
    }
    BatchMulPreprocessing::new(g2_generator(), scalars.len()).batch_mul(scalars)
}

impl Srs {
    /// Highest polynomial degree that can be committed.
    pub fn degree_bound(&self) -> usize {
        self.g1_powers.len() - 1
    }

    pub fn g1_powers(&self) -> &[G1Affine] {
        &self.g1_powers
    }

    pub fn g2_powers(&self) -> &[G2Affine] {
        &self.g2_powers
    }

    pub fn g1(&self) -> G1Affine {
        self.g1_powers[0]
    }

    pub fn g2(&self) -> G2Affine {
        self.g2_powers[0]
    }

    pub fn g2_tau(&self) -> G2Affine {
        self.g2_powers[1]
    }

    /// Only present when the setup ran with `insecure_retain_trapdoor`.
    pub fn trapdoor(&self) -> Option<Scalar> {
        self.trapdoor
    }

    /// Checks `e(g^(tau^j), g2) = e(g^(tau^(j-1)), g2^tau)` for every j
    /// and the analogous relation on the G2 side.
    pub fn check_consistency(&self) -> bool {
        let g1 = self.g1().into_group();
        let g2 = self.g2().into_group();
        let tau2 = self.g2_tau().into_group();
        let g1_ok = self.g1_powers.windows(2).all(|w| {
            Bls12_381::multi_pairing([w[1].into_group(), -w[0].into_group()], [g2, tau2]).is_zero()
        });
        let g2_ok = self.g2_powers.windows(2).all(|w| {
            let tau1 = self.g1_powers[1].into_group();
            Bls12_381::multi_pairing([g1, -tau1], [w[1].into_group(), w[0].into_group()]).is_zero()
        });
        g1_ok && g2_ok && !self.g1().is_zero() && !self.g2().is_zero()
    }

    /// `SVCSRS01 | u32 l | (l+1) x G1 | 2 x G2`, all points compressed.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + self.g1_powers.len() * G1_BYTES + 2 * G2_BYTES);
        out.extend_from_slice(SRS_MAGIC.as_bytes());
        out.extend_from_slice(&(self.degree_bound() as u32).to_le_bytes());
        for p in &self.g1_powers {
            out.extend_from_slice(&g1_to_bytes(&p.into_group()));
        }
        for p in &self.g2_powers[..2] {
            out.extend_from_slice(&g2_to_bytes(p));
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = Reader::new(bytes);
        r.magic(SRS_MAGIC)?;
        let l = r.u32()? as usize;
        if l == 0 {
            return Err(FormatError::InvalidValue("degree bound must be positive".into()));
        }
        let need = (l + 1).checked_mul(G1_BYTES).ok_or(FormatError::InvalidValue("length overflow".into()))?;
        if bytes.len() < need {
            return Err(FormatError::Truncated { offset: 12, needed: need - bytes.len() });
        }
        let mut g1_powers = Vec::with_capacity(l + 1);
        for _ in 0..=l {
            g1_powers.push(g1_from_bytes(r.take(G1_BYTES)?)?.into_affine());
        }
        let mut g2_powers = Vec::with_capacity(2);
        for _ in 0..2 {
            g2_powers.push(g2_from_bytes(r.take(G2_BYTES)?)?);
        }
        r.finish()?;
        Ok(Self { g1_powers, g2_powers, trapdoor: None })
    }
}

pub fn msm(bases: &[G1Affine], scalars: &[Scalar]) -> G1Projective {
    debug_assert_eq!(bases.len(), scalars.len());
    G1Projective::msm(bases, scalars).expect("equal lengths")
}

/// `g^(phi(tau))` by multi-scalar multiplication over the powers.
pub fn commit_poly(srs: &Srs, poly: &DensePolynomial) -> Result<G1Projective> {
    let n = poly.coeffs().len();
    if n > srs.g1_powers.len() {
        return Err(VcError::DegreeBound { degree: n - 1, bound: srs.degree_bound() });
    }
    Ok(msm(&srs.g1_powers[..n], poly.coeffs()))
}

/// The G2 analogue, bounded by the number of published G2 powers.
pub fn commit_poly_g2(srs: &Srs, poly: &DensePolynomial) -> Result<G2Projective> {
    let n = poly.coeffs().len();
    if n > srs.g2_powers.len() {
        return Err(VcError::DegreeBound {
            degree: n - 1,
            bound: srs.g2_powers.len() - 1,
        });
    }
    Ok(G2Projective::msm(&srs.g2_powers[..n], poly.coeffs()).expect("equal lengths"))
}

/// Returns `(phi(point), g^q(tau))` with `q = (phi - phi(point)) / (X - point)`.
pub fn open_poly(srs: &Srs, poly: &DensePolynomial, point: &Scalar) -> Result<(Scalar, G1Projective)> {
    let (q, value) = poly.divide_by_linear(point);
    Ok((value, commit_poly(srs, &q)?))
}

/// `e(C - value*g, g2) == e(proof, g2^tau - point*g2)`
pub fn verify_kzg(srs: &Srs, commitment: &G1Projective, point: &Scalar, value: &Scalar, proof: &G1Projective) -> bool {
    let g1 = srs.g1().into_group();
    let g2 = srs.g2().into_group();
    let shifted = srs.g2_tau().into_group() - g2 * point;
    Bls12_381::multi_pairing([*commitment - g1 * value, -*proof], [g2, shifted]).is_zero()
}

/// The Lagrange basis polynomial `L_index` for the domain `{0, .., n-1}`.
pub fn lagrange_basis(n: usize, index: usize) -> Result<DensePolynomial> {
    if n == 0 {
        return Err(VcError::InvalidParameter("empty domain".into()));
    }
    if index >= n {
        return Err(VcError::IndexOutOfRange { index, len: n });
    }
    let v = DensePolynomial::vanishing_range(0, n as u64);
    let (basis, _) = v.divide_by_linear(&Scalar::from(index as u64));
    Ok(basis.scale(&barycentric_denominator(n, index).inverse().unwrap()))
}

/// Group order size in bits, for cost estimates.
pub fn scalar_bits() -> u32 {
    Scalar::MODULUS_BIT_SIZE
}
