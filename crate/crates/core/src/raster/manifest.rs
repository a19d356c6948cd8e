use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{load_gray, load_mask, same_dims, BinaryMask, GrayImage};
use crate::{Error, Result};

#[derive(Debug, Deserialize, Serialize)]
struct ManifestFile {
    name: String,
    items: Vec<ItemFile>,
}

#[derive(Debug, Deserialize, Serialize)]
struct ItemFile {
    image: String,
    mask: String,
}

/// One image/mask pair. `label` is the image path as written in the
/// manifest and is what reports print, so output does not depend on where
/// the dataset lives on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestItem {
    pub label: String,
    pub image: PathBuf,
    pub mask: PathBuf,
}

/// A named, ordered list of image/mask pairs.
///
/// On disk: `{"name": "...", "items": [{"image": "...", "mask": "..."}]}`
/// with relative paths resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub name: String,
    pub items: Vec<ManifestItem>,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new("")), path)
    }

    /// Parses manifest JSON; `origin` only labels errors.
    pub fn parse(text: &str, base_dir: &Path, origin: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Manifest { path: origin.to_path_buf(), reason };
        let file: ManifestFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        if file.items.is_empty() {
            return Err(bad("manifest has no items".into()));
        }
        let mut seen = HashSet::new();
        let mut items = Vec::with_capacity(file.items.len());
        for (i, item) in file.items.into_iter().enumerate() {
            let image = base_dir.join(&item.image);
            let mask = base_dir.join(&item.mask);
            if image == mask {
                return Err(bad(format!("item {i}: image and mask are the same file")));
            }
            if !seen.insert(item.image.clone()) {
                return Err(bad(format!("item {i}: duplicate image {}", item.image)));
            }
            items.push(ManifestItem { label: item.image, image, mask });
        }
        Ok(Self { name: file.name, items })
    }

    /// Builds a manifest from already-resolved items.
    pub fn from_items(name: impl Into<String>, items: Vec<ManifestItem>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Manifest { path: PathBuf::new(), reason: "manifest has no items".into() });
        }
        Ok(Self { name: name.into(), items })
    }

    pub fn to_json(&self) -> String {
        let file = ManifestFile {
            name: self.name.clone(),
            items: self
                .items
                .iter()
                .map(|i| ItemFile { image: i.image.display().to_string(), mask: i.mask.display().to_string() })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("manifest serializes")
    }

    /// Loads item `index`, checking that image and mask sizes agree.
    pub fn load_item(&self, index: usize) -> Result<(GrayImage, BinaryMask)> {
        let item = &self.items[index];
        let wrap = |e: Error| Error::Item { index, label: item.label.clone(), source: Box::new(e) };
        let image = load_gray(&item.image).map_err(wrap)?;
        let mask = load_mask(&item.mask).map_err(wrap)?;
        same_dims((image.width(), image.height()), (mask.width(), mask.height())).map_err(wrap)?;
        Ok((image, mask))
    }

    pub fn load_mask(&self, index: usize) -> Result<BinaryMask> {
        let item = &self.items[index];
        load_mask(&item.mask).map_err(|e| Error::Item { index, label: item.label.clone(), source: Box::new(e) })
    }
}
