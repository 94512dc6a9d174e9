//! JSON model file: the on-disk form of [`ManipulatorModel`].
//!
//! Schema: `links[6]{a, alpha, d, theta_offset, mass, com[3],
//! inertia[9] row-major}`, `gravity[3]`, `base_pose{p[3], q[4] wxyz}`.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use manip_core::dynamics::{BasePose, LinkParams, ManipulatorModel};
use manip_core::quat::Quat;
use manip_core::{Mat3, Vec3};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub links: Vec<LinkFile>,
    pub gravity: [f64; 3],
    pub base_pose: BasePoseFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkFile {
    pub a: f64,
    pub alpha: f64,
    pub d: f64,
    pub theta_offset: f64,
    pub mass: f64,
    pub com: [f64; 3],
    /// Rotational inertia about the link COM, row-major.
    pub inertia: [f64; 9],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasePoseFile {
    pub p: [f64; 3],
    /// Unit quaternion, scalar first (w, x, y, z).
    pub q: [f64; 4],
}

impl ModelFile {
    pub fn to_model(&self) -> anyhow::Result<ManipulatorModel> {
        if self.links.len() != 6 {
            bail!("model must have exactly 6 links, got {}", self.links.len());
        }
        let mut links = Vec::with_capacity(6);
        for (i, l) in self.links.iter().enumerate() {
            let link = LinkParams {
                dh_a: l.a,
                dh_alpha: l.alpha,
                dh_d: l.d,
                dh_theta_offset: l.theta_offset,
                mass: l.mass,
                com: Vec3::from_column_slice(&l.com),
                inertia: Mat3::from_row_slice(&l.inertia),
            };
            link.validate()
                .with_context(|| format!("link {} invalid", i + 1))?;
            links.push(link);
        }
        let q = Quat::new(
            self.base_pose.q[0],
            self.base_pose.q[1],
            self.base_pose.q[2],
            self.base_pose.q[3],
        )
        .normalize()
        .context("base_pose.q degenerate")?;
        Ok(ManipulatorModel {
            links: links.try_into().expect("length checked above"),
            gravity: Vec3::from_column_slice(&self.gravity),
            base_pose: BasePose {
                position: Vec3::from_column_slice(&self.base_pose.p),
                orientation: q,
            },
        })
    }

    pub fn from_model(m: &ManipulatorModel) -> Self {
        Self {
            links: m
                .links
                .iter()
                .map(|l| LinkFile {
                    a: l.dh_a,
                    alpha: l.dh_alpha,
                    d: l.dh_d,
                    theta_offset: l.dh_theta_offset,
                    mass: l.mass,
                    com: [l.com.x, l.com.y, l.com.z],
                    inertia: core::array::from_fn(|k| l.inertia[(k / 3, k % 3)]),
                })
                .collect(),
            gravity: [m.gravity.x, m.gravity.y, m.gravity.z],
            base_pose: BasePoseFile {
                p: [
                    m.base_pose.position.x,
                    m.base_pose.position.y,
                    m.base_pose.position.z,
                ],
                q: [
                    m.base_pose.orientation.as_quat().w,
                    m.base_pose.orientation.as_quat().x,
                    m.base_pose.orientation.as_quat().y,
                    m.base_pose.orientation.as_quat().z,
                ],
            },
        }
    }
}

/// Load and validate a model file.
pub fn load(path: &Path) -> anyhow::Result<ManipulatorModel> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading model file {}", path.display()))?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| {
        anyhow::anyhow!(
            "model file {} parse error at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        )
    })?;
    file.to_model()
}
