//! The hypersurface file: how to rebuild the map, and the envelope chart
//! extracted from it.

use bonnet_core::fixtures::{Catenoid, CliffordTorus, GreatSphere, Helicoid, MercatorSphere};
use bonnet_core::hypersurface::{BiUmbilical, HypersurfaceChart, HypersurfaceMap, MinimalFromR3, MinimalFromS3, SplineChart, SurfaceChart};
use bonnet_core::io::SurfaceFile;
use bonnet_core::{Grid2D, ScalarField, VectorField};
use serde::{Deserialize, Serialize};

use crate::config::{FixtureName, Kind};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Source {
    Fixture {
        name: FixtureName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    Surface {
        surface: SurfaceFile,
    },
}

/// l and r on a grid; the generator basis is rebuilt from `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartData {
    pub grid: Grid2D,
    pub base: [usize; 2],
    pub l: Vec<Vec<f64>>,
    pub r: Vec<f64>,
}

impl ChartData {
    pub fn from_chart(chart: &HypersurfaceChart, base: (usize, usize)) -> Self {
        ChartData {
            grid: *chart.grid(),
            base: [base.0, base.1],
            l: chart.l.nodes().map(<[f64]>::to_vec).collect(),
            r: chart.r.values().to_vec(),
        }
    }

    pub fn chart(&self, n: usize) -> Result<HypersurfaceChart, CliError> {
        let l = VectorField::from_nodes(self.grid, n + 1, &self.l).map_err(|e| CliError::Config(format!("chart l: {e}")))?;
        let r = ScalarField::new(self.grid, self.r.clone()).map_err(|e| CliError::Config(format!("chart r: {e}")))?;
        Ok(HypersurfaceChart::new(n, l, r, (self.base[0], self.base[1]))?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperFile {
    pub kind: Kind,
    pub n: usize,
    pub source: Source,
    pub alpha: f64,
    /// Parameter domain `[u0, u1, v0, v1]` of the base surface.
    pub domain: [f64; 4],
    /// Point whose completion seeds the generator basis.
    pub base: [f64; 2],
    pub w_range: f64,
    pub mean_tol: f64,
    pub chart: Option<ChartData>,
}

/// Default base surface of a kind.
pub fn default_fixture(kind: Kind) -> FixtureName {
    match kind {
        Kind::Biumbilical => FixtureName::MercatorSphere,
        Kind::MinimalR3 => FixtureName::Catenoid,
        Kind::MinimalS3 => FixtureName::Clifford,
    }
}

pub fn default_domain(source: &Source) -> [f64; 4] {
    match source {
        Source::Fixture { name, .. } => match name {
            FixtureName::Clifford => [0.0, 1.0, 0.0, 1.0],
            FixtureName::GreatSphere => [-0.5, 0.5, -0.5, 0.5],
            FixtureName::Catenoid | FixtureName::Helicoid | FixtureName::MercatorSphere => [-1.0, 1.0, -1.0, 1.0],
        },
        Source::Surface { surface } => {
            let g = surface.grid;
            [g.u_min(), g.u_max(), g.v_min(), g.v_max()]
        }
    }
}

fn fits(kind: Kind, name: FixtureName) -> bool {
    matches!(
        (kind, name),
        (Kind::Biumbilical, FixtureName::MercatorSphere)
            | (Kind::MinimalR3, FixtureName::Catenoid | FixtureName::Helicoid)
            | (Kind::MinimalS3, FixtureName::Clifford | FixtureName::GreatSphere)
    )
}

impl HyperFile {
    /// Rebuilds the hypersurface map, rechecking its preconditions.
    pub fn map(&self) -> Result<Box<dyn HypersurfaceMap>, CliError> {
        let [u0, u1, v0, v1] = self.domain;
        if !(u0 < u1 && v0 < v1) || !(self.base[0] >= u0 && self.base[0] <= u1 && self.base[1] >= v0 && self.base[1] <= v1) {
            return Err(CliError::Config("base point must lie in a nonempty domain".into()));
        }
        let base = (self.base[0], self.base[1]);
        let chart: Box<dyn SurfaceChart> = match &self.source {
            Source::Fixture { name, radius } => {
                if !fits(self.kind, *name) {
                    return Err(CliError::Config(format!("fixture {name:?} cannot be used for kind {:?}", self.kind)));
                }
                let r = radius.unwrap_or(1.0);
                match name {
                    FixtureName::Clifford => Box::new(CliffordTorus { radius: r }),
                    FixtureName::GreatSphere => Box::new(GreatSphere),
                    FixtureName::Catenoid => Box::new(Catenoid),
                    FixtureName::Helicoid => Box::new(Helicoid),
                    FixtureName::MercatorSphere => Box::new(MercatorSphere { radius: r }),
                }
            }
            Source::Surface { surface } => {
                if self.kind != Kind::MinimalS3 {
                    return Err(CliError::Config("surface input is only accepted for minimal-s3".into()));
                }
                let s = surface.surface().map_err(|e| CliError::Config(format!("surface input: {e}")))?;
                Box::new(SplineChart::new(&s))
            }
        };
        Ok(match self.kind {
            Kind::Biumbilical => {
                let r = match &self.source {
                    Source::Fixture { radius, .. } => radius.unwrap_or(1.0),
                    Source::Surface { .. } => unreachable!("rejected above"),
                };
                Box::new(BiUmbilical::new(chart, r, self.alpha, self.n)?)
            }
            Kind::MinimalR3 => Box::new(MinimalFromR3::new(chart, self.n, self.domain, self.mean_tol)?),
            Kind::MinimalS3 => Box::new(MinimalFromS3::new(chart, self.n, self.domain, base, self.mean_tol)?),
        })
    }
}
