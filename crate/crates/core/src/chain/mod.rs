//! Target regions to an ordered, tracked centroid chain.

mod ccl;
mod order;
mod tracker;
mod union_find;

pub use ccl::{connected_components, region_centroid, Region, DEFAULT_MIN_AREA};
pub use order::{order_chain, path_cost};
pub use tracker::{CentroidChain, CentroidTrack, CentroidTracker, ChainLink, TrackUpdate, TrackerConfig};
pub use union_find::UnionFind;
