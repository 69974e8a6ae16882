//! Pattern spectra and granulometric indices.

mod derivative;
mod features;
mod linear;
mod square;

pub use derivative::{discrete_volume_derivative, level_volume_derivative, volume_above};
pub use features::{
    high_low_direction, normalized_mdgi, order_stat_features, order_stat_ranks, FeatureRecord,
};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::dem::{Dem, Direction};
use crate::error::{Error, Result};
use crate::morphology::{multiscale_open, open_segments, NamedSe, Shape, StructuringElement};

/// Which scale sequence a spectrum is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Openings by `nSE` for `n = 0, 1, ...`.
    Scaled,
    /// Openings by segments `L_k` of `k` cells for `k = 1, 2, ...`.
    Segments,
}

impl Family {
    /// Scale index of the first volume.
    pub fn first_index(self) -> usize {
        match self {
            Family::Scaled => 0,
            Family::Segments => 1,
        }
    }
}

/// Opening volumes along a scale sequence and their normalized losses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSpectrum {
    se_name: String,
    family: Family,
    volumes: Vec<u64>,
}

impl PatternSpectrum {
    /// Checks that the volumes are positive at first, non-increasing, and
    /// end at their first 0.
    pub fn from_volumes(se_name: impl Into<String>, family: Family, volumes: Vec<u64>) -> Result<Self> {
        match volumes.first() {
            None | Some(0) => return Err(Error::ZeroVolume),
            _ => {}
        }
        let bad = volumes.windows(2).any(|w| w[1] > w[0] || w[0] == 0);
        if bad || *volumes.last().unwrap() != 0 {
            return Err(Error::InvalidDem(format!(
                "volumes {volumes:?} do not decrease to a single final 0"
            )));
        }
        Ok(PatternSpectrum {
            se_name: se_name.into(),
            family,
            volumes,
        })
    }

    pub fn se_name(&self) -> &str {
        &self.se_name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// `volumes()[i]` is the opening volume at scale `first_index() + i`.
    pub fn volumes(&self) -> &[u64] {
        &self.volumes
    }

    pub fn first_index(&self) -> usize {
        self.family.first_index()
    }

    /// Scale at which the opening volume first reaches 0.
    pub fn n0(&self) -> usize {
        self.first_index() + self.volumes.len() - 1
    }

    /// Volume of the input.
    pub fn total(&self) -> u64 {
        self.volumes[0]
    }

    /// Volume lost between consecutive scales, aligned with [`Self::probs`].
    pub fn losses(&self) -> Vec<u64> {
        self.volumes.windows(2).map(|w| w[0] - w[1]).collect()
    }

    /// Exact probabilities for scales `first_index() .. n0()`.
    pub fn probs(&self) -> Vec<Ratio<u64>> {
        let total = self.total();
        self.losses().into_iter().map(|l| Ratio::new(l, total)).collect()
    }

    /// Probability at a scale index; 0 outside the support.
    pub fn prob(&self, scale: usize) -> Ratio<u64> {
        let total = self.total();
        scale
            .checked_sub(self.first_index())
            .filter(|&i| i + 1 < self.volumes.len())
            .map_or(Ratio::new(0, 1), |i| Ratio::new(self.volumes[i] - self.volumes[i + 1], total))
    }

    pub fn entropy(&self) -> f64 {
        granulometric_index(self)
    }
}

/// Shannon entropy of the spectrum in nats, with `0 ln 0 = 0`.
pub fn granulometric_index(ps: &PatternSpectrum) -> f64 {
    entropy_of(&ps.losses(), ps.total())
}

pub(crate) fn entropy_of(weights: &[u64], total: u64) -> f64 {
    let t = total as f64;
    -weights
        .iter()
        .filter(|&&w| w > 0)
        .map(|&w| {
            let p = w as f64 / t;
            p * p.ln()
        })
        .sum::<f64>()
        + 0.0
}

/// How to evaluate a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Cheapest available path.
    #[default]
    Auto,
    /// One stack pass per line for segments, chained erosions for squares.
    Fast,
    /// One opening per scale until the volume vanishes.
    Direct,
}

pub fn pattern_spectrum(dem: &Dem, se: &StructuringElement) -> Result<PatternSpectrum> {
    pattern_spectrum_with(dem, se, Method::Auto)
}

pub fn pattern_spectrum_named(dem: &Dem, se: NamedSe) -> Result<PatternSpectrum> {
    spectrum_inner(dem, &se.element(), se.name(), Method::Auto)
}

pub fn pattern_spectrum_with(dem: &Dem, se: &StructuringElement, method: Method) -> Result<PatternSpectrum> {
    let name = match se.shape() {
        Shape::Line { direction, radius: 1 } => NamedSe::for_direction(direction).name().to_string(),
        Shape::Square { radius: 1 } => NamedSe::B.name().to_string(),
        _ => format!("{:?}", se.offsets()),
    };
    spectrum_inner(dem, se, &name, method)
}

fn spectrum_inner(dem: &Dem, se: &StructuringElement, name: &str, method: Method) -> Result<PatternSpectrum> {
    if dem.volume() == 0 {
        return Err(Error::ZeroVolume);
    }
    let shape = se.shape();
    if shape == Shape::Origin {
        return Err(Error::InvalidElement(
            "openings by the origin alone never vanish".into(),
        ));
    }
    let volumes = match (shape, method) {
        (Shape::Line { direction, radius }, Method::Auto | Method::Fast) => {
            let hist = linear::run_length_volumes(dem, direction);
            let volumes = linear::scaled_volumes(&hist);
            if radius == 1 {
                volumes
            } else {
                resample(&volumes, radius)
            }
        }
        (Shape::Square { radius }, Method::Auto | Method::Fast) => {
            let volumes = square::square_volumes(dem);
            if radius == 1 {
                volumes
            } else {
                resample(&volumes, radius)
            }
        }
        _ => direct_volumes(dem, se),
    };
    PatternSpectrum::from_volumes(name, Family::Scaled, volumes)
}

/// Volumes for `n * radius` from volumes indexed by `n`.
fn resample(volumes: &[u64], radius: usize) -> Vec<u64> {
    let mut out: Vec<u64> = volumes.iter().step_by(radius).copied().collect();
    if *out.last().unwrap() != 0 {
        out.push(0);
    }
    out
}

fn direct_volumes(dem: &Dem, se: &StructuringElement) -> Vec<u64> {
    let mut out = vec![dem.volume()];
    let mut n = 1;
    while *out.last().unwrap() > 0 {
        out.push(multiscale_open(dem, se, n).volume());
        n += 1;
    }
    out
}

/// Spectrum of the segment family `L_1, L_2, ...` along a direction.
pub fn segment_spectrum(dem: &Dem, direction: Direction) -> Result<PatternSpectrum> {
    segment_spectrum_with(dem, direction, Method::Auto)
}

pub fn segment_spectrum_with(dem: &Dem, direction: Direction, method: Method) -> Result<PatternSpectrum> {
    if dem.volume() == 0 {
        return Err(Error::ZeroVolume);
    }
    let volumes = match method {
        Method::Auto | Method::Fast => linear::segment_volumes(&linear::run_length_volumes(dem, direction)),
        Method::Direct => {
            let mut out = vec![dem.volume()];
            let mut k = 2;
            while *out.last().unwrap() > 0 {
                out.push(open_segments(dem, direction, k).volume());
                k += 1;
            }
            out
        }
    };
    let name = format!("L/{}", direction.name());
    PatternSpectrum::from_volumes(name, Family::Segments, volumes)
}

/// Index of the first scale at which two spectra assign different
/// probabilities, or `None` when they agree everywhere.
pub fn compare_spectra(a: &PatternSpectrum, b: &PatternSpectrum) -> Option<usize> {
    let lo = a.first_index().min(b.first_index());
    let hi = a.n0().max(b.n0());
    (lo..hi).find(|&s| a.prob(s) != b.prob(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphology::named_se;

    fn row(values: &[u32]) -> Dem {
        Dem::from_grid(&[values.to_vec()]).unwrap()
    }

    fn r(a: u64, b: u64) -> Ratio<u64> {
        Ratio::new(a, b)
    }

    #[test]
    fn small_row_spectrum() {
        let ps = pattern_spectrum_named(&row(&[2, 5, 5, 2, 2]), NamedSe::B4).unwrap();
        assert_eq!(ps.volumes(), &[16, 10, 10, 0]);
        assert_eq!(ps.probs(), vec![r(6, 16), r(0, 1), r(10, 16)]);
        assert_eq!(ps.n0(), 3);
        assert!((ps.entropy() - 0.661563).abs() < 1e-5);
    }

    #[test]
    fn constant_row_is_a_point_mass() {
        let ps = pattern_spectrum_named(&row(&[3; 5]), NamedSe::B4).unwrap();
        assert_eq!(ps.probs(), vec![r(0, 1), r(0, 1), r(1, 1)]);
        assert_eq!(ps.entropy(), 0.0);
    }

    #[test]
    fn methods_agree() {
        let dem = Dem::from_rows(&[
            vec![Some(3), Some(1), Some(4), Some(1), Some(5)],
            vec![Some(9), None, Some(2), Some(6), Some(5)],
            vec![Some(3), Some(5), Some(8), Some(9), Some(7)],
            vec![Some(9), Some(3), Some(2), None, Some(3)],
        ])
        .unwrap();
        for se in NamedSe::ALL {
            let e = se.element();
            let fast = pattern_spectrum_with(&dem, &e, Method::Fast).unwrap();
            let direct = pattern_spectrum_with(&dem, &e, Method::Direct).unwrap();
            assert_eq!(fast, direct, "{se}");
            let bigger = StructuringElement::line(Direction::Row, 2);
            assert_eq!(
                pattern_spectrum_with(&dem, &bigger, Method::Fast),
                pattern_spectrum_with(&dem, &bigger, Method::Direct)
            );
        }
        for d in Direction::ALL {
            assert_eq!(
                segment_spectrum_with(&dem, d, Method::Fast),
                segment_spectrum_with(&dem, d, Method::Direct)
            );
        }
    }

    #[test]
    fn segment_family() {
        let ps = segment_spectrum(&row(&[2, 5, 5, 2, 2]), Direction::Row).unwrap();
        assert_eq!(ps.prob(2), r(6, 16));
        assert_eq!(ps.prob(5), r(10, 16));
        assert_eq!(ps.probs().iter().sum::<Ratio<u64>>(), r(1, 1));
        let ps = segment_spectrum(&row(&[1, 2, 1]), Direction::Row).unwrap();
        assert_eq!((ps.prob(1), ps.prob(3)), (r(1, 4), r(3, 4)));
    }

    #[test]
    fn entropy_examples() {
        let uniform = PatternSpectrum::from_volumes("x", Family::Scaled, vec![4, 3, 2, 1, 0]).unwrap();
        assert!((granulometric_index(&uniform) - 4f64.ln()).abs() < 1e-12);
        let point = PatternSpectrum::from_volumes("x", Family::Scaled, vec![4, 0]).unwrap();
        assert_eq!(granulometric_index(&point), 0.0);
    }

    #[test]
    fn invalid_inputs() {
        let zero = Dem::from_grid(&[vec![1, 1]]).unwrap().with_values(vec![0, 0]);
        assert_eq!(pattern_spectrum(&zero, &named_se("B").unwrap()), Err(Error::ZeroVolume));
        let dem = row(&[1, 2]);
        assert!(pattern_spectrum(&dem, &StructuringElement::origin()).is_err());
        assert!(PatternSpectrum::from_volumes("x", Family::Scaled, vec![3, 4, 0]).is_err());
        assert!(PatternSpectrum::from_volumes("x", Family::Scaled, vec![3, 0, 0]).is_err());
        assert!(PatternSpectrum::from_volumes("x", Family::Scaled, vec![3, 1]).is_err());
    }

    #[test]
    fn general_elements_use_openings() {
        let cross = StructuringElement::new([(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]).unwrap();
        let dem = Dem::from_grid(&[vec![1, 5, 1], vec![5, 5, 5], vec![1, 5, 1]]).unwrap();
        let ps = pattern_spectrum(&dem, &cross).unwrap();
        assert_eq!(ps.volumes(), &[29, 25, 0]);
    }

    #[test]
    fn comparing() {
        let a = pattern_spectrum_named(&row(&[2, 5, 5, 2, 2]), NamedSe::B4).unwrap();
        let b = pattern_spectrum_named(&row(&[4, 10, 10, 4, 4]), NamedSe::B4).unwrap();
        assert_eq!(compare_spectra(&a, &b), None);
        let c = pattern_spectrum_named(&row(&[2, 5, 5, 5, 2]), NamedSe::B4).unwrap();
        assert_eq!(compare_spectra(&a, &c), Some(0));
    }
}
