//! Synthetic scene descriptions for measurement simulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PermittivityField;
use crate::grid::Domain;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SceneObject {
    Ball {
        center: [f64; 3],
        radius: f64,
        eps: f64,
    },
    Box {
        min: [f64; 3],
        max: [f64; 3],
        eps: f64,
    },
}

/// List of penetrable objects in air; later objects overwrite earlier ones
/// where they overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Scene {
    pub objects: Vec<SceneObject>,
}

impl Scene {
    pub fn ball(center: [f64; 3], radius: f64, eps: f64) -> Self {
        Scene {
            objects: vec![SceneObject::Ball { center, radius, eps }],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Scene = serde_json::from_str(text)?;
        scene.validate(f64::INFINITY)?;
        Ok(scene)
    }

    pub fn validate(&self, eps_upper_bound: f64) -> Result<()> {
        for obj in &self.objects {
            let eps = match obj {
                SceneObject::Ball { radius, eps, .. } => {
                    if *radius <= 0.0 {
                        return Err(Error::invalid("ball radius must be positive"));
                    }
                    *eps
                }
                SceneObject::Box { min, max, eps } => {
                    if (0..3).any(|c| min[c] >= max[c]) {
                        return Err(Error::invalid("box bounds must be increasing"));
                    }
                    *eps
                }
            };
            if eps < 1.0 || eps > eps_upper_bound {
                return Err(Error::invalid(format!(
                    "object permittivity {eps} outside [1, {eps_upper_bound}]"
                )));
            }
        }
        Ok(())
    }

    /// Rasterize onto the grid (node-centred membership test).
    pub fn rasterize(&self, domain: &Domain) -> PermittivityField {
        PermittivityField::from_fn(domain, |x, y, z| {
            let mut value = 1.0;
            for obj in &self.objects {
                match obj {
                    SceneObject::Ball { center, radius, eps } => {
                        let r2 = (x - center[0]).powi(2)
                            + (y - center[1]).powi(2)
                            + (z - center[2]).powi(2);
                        if r2 <= radius * radius {
                            value = *eps;
                        }
                    }
                    SceneObject::Box { min, max, eps } => {
                        if x >= min[0]
                            && x <= max[0]
                            && y >= min[1]
                            && y <= max[1]
                            && z >= min[2]
                            && z <= max[2]
                        {
                            value = *eps;
                        }
                    }
                }
            }
            value
        })
    }
}
