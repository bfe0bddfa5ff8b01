use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Catalog, CustomWarp, WarpedSurface};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpConfig {
    pub phi: String,
    pub dphi: String,
    pub ddphi: String,
}

/// JSON surface description, e.g. `{"catalog": "hyperbolic", "T_num": 20}`
/// or `{"catalog": "custom", "warp": {"phi": "...", "dphi": "...", "ddphi": "..."}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub catalog: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(rename = "T_num", default, skip_serializing_if = "Option::is_none")]
    pub t_num: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warp: Option<WarpConfig>,
}

impl SurfaceConfig {
    pub fn catalog(name: &str) -> Self {
        Self {
            catalog: name.to_string(),
            params: BTreeMap::new(),
            t_num: None,
            warp: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("surface config: {e}")))
    }

    pub fn build(&self) -> Result<WarpedSurface> {
        if let Some(k) = self.params.keys().next() {
            return Err(Error::invalid(format!(
                "catalog surfaces take no parameters (got {k:?})"
            )));
        }
        let catalog = Catalog::parse(&self.catalog)?;
        match (catalog, &self.warp) {
            (Catalog::Custom, Some(w)) => {
                let warp = CustomWarp::parse(&w.phi, &w.dphi, &w.ddphi)?;
                WarpedSurface::custom(warp, self.t_num.unwrap_or(20.0))
            }
            (Catalog::Custom, None) => Err(Error::invalid("custom surface needs a \"warp\" object")),
            (_, Some(_)) => Err(Error::invalid("\"warp\" is only allowed for custom surfaces")),
            (c, None) => {
                let s = WarpedSurface::catalog(c)?;
                match self.t_num {
                    Some(t) => s.with_t_num(t),
                    None => Ok(s),
                }
            }
        }
    }
}

impl WarpedSurface {
    /// Configuration that rebuilds this surface.
    pub fn to_config(&self) -> SurfaceConfig {
        let mut c = SurfaceConfig::catalog(self.name());
        c.t_num = Some(self.t_num());
        if let Some(w) = self.custom_warp() {
            c.warp = Some(WarpConfig {
                phi: w.source[0].clone(),
                dphi: w.source[1].clone(),
                ddphi: w.source[2].clone(),
            });
        }
        c
    }
}
