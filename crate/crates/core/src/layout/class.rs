use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Semantic class registry shared by every raster and render buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[repr(u8)]
pub enum SemanticClass {
    #[default]
    Null = 0,
    Road = 1,
    Highway = 2,
    /// Generic building class in layouts; the facade label after relabeling.
    BuildingFacade = 3,
    Vegetation = 4,
    Water = 5,
    Other = 6,
    Vehicle = 7,
    BuildingRoof = 8,
}

impl SemanticClass {
    pub const COUNT: usize = 9;

    pub const ALL: [SemanticClass; Self::COUNT] = [
        SemanticClass::Null,
        SemanticClass::Road,
        SemanticClass::Highway,
        SemanticClass::BuildingFacade,
        SemanticClass::Vegetation,
        SemanticClass::Water,
        SemanticClass::Other,
        SemanticClass::Vehicle,
        SemanticClass::BuildingRoof,
    ];

    /// Layout rasters use the facade code for all building pixels.
    pub const BUILDING: SemanticClass = SemanticClass::BuildingFacade;

    #[inline]
    pub fn id(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn is_null(self) -> bool {
        self == SemanticClass::Null
    }

    #[inline]
    pub fn is_building(self) -> bool {
        matches!(self, SemanticClass::BuildingFacade | SemanticClass::BuildingRoof)
    }

    #[inline]
    pub fn is_road(self) -> bool {
        matches!(self, SemanticClass::Road | SemanticClass::Highway)
    }

    pub fn name(self) -> &'static str {
        match self {
            SemanticClass::Null => "null",
            SemanticClass::Road => "road",
            SemanticClass::Highway => "highway",
            SemanticClass::BuildingFacade => "building",
            SemanticClass::Vegetation => "vegetation",
            SemanticClass::Water => "water",
            SemanticClass::Other => "other",
            SemanticClass::Vehicle => "vehicle",
            SemanticClass::BuildingRoof => "roof",
        }
    }

    /// Display palette used for indexed PNGs and as render albedo.
    pub fn palette_rgb(self) -> [u8; 3] {
        match self {
            SemanticClass::Null => [0, 0, 0],
            SemanticClass::Road => [210, 40, 40],
            SemanticClass::Highway => [150, 20, 60],
            SemanticClass::BuildingFacade => [235, 200, 60],
            SemanticClass::Vegetation => [60, 160, 70],
            SemanticClass::Water => [40, 90, 210],
            SemanticClass::Other => [60, 200, 200],
            SemanticClass::Vehicle => [120, 120, 130],
            SemanticClass::BuildingRoof => [170, 110, 80],
        }
    }
}

impl TryFrom<u8> for SemanticClass {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        SemanticClass::ALL
            .get(v as usize)
            .copied()
            .ok_or_else(|| Error::invalid(format!("unregistered semantic class code {v}")))
    }
}
