//! Blind watermarking of triangle meshes.
//!
//! A payload is hidden in the distances of the most salient vertices from the
//! mesh centroid using quantization index modulation, and recovered later from
//! the mesh and the key alone.
//!
//! ```
//! use meshmark::{embed, extract, correlation, shapes, WatermarkKey};
//!
//! let mesh = shapes::wavy_torus(96, 48, 1.0, 0.45, 0.25);
//! let key = WatermarkKey::with_key1(7);
//! let (marked, _) = embed(&mesh, &key).unwrap();
//! let found = extract(&marked, &key).unwrap();
//! let expected = meshmark::generate_watermark(7, key.payload_bits);
//! assert_eq!(correlation(&found.watermark, &expected).value, 1.0);
//! ```

pub mod attacks;
mod error;
pub mod mesh;
pub mod metrics;
pub mod qim;
pub mod saliency;
pub mod shapes;
pub mod watermark;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/meshes.md")]
    mod meshes {}
    #[doc = include_str!("../../../book/src/saliency.md")]
    mod saliency {}
    #[doc = include_str!("../../../book/src/qim.md")]
    mod qim {}
    #[doc = include_str!("../../../book/src/watermark.md")]
    mod watermark {}
    #[doc = include_str!("../../../book/src/attacks.md")]
    mod attacks {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
}

pub use error::{Error, ParseErrorKind, Result};
pub use mesh::{normalize, read_mesh, write_mesh, Mesh};
pub use watermark::{
    correlation, embed, extract, generate_watermark, CarrierMode, Correlation, EmbedReport, Extraction, Watermark,
    WatermarkKey,
};
