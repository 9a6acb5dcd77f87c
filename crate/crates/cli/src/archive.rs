//! Packing matrix groups into tar archives and reading them back.
//!
//! Archives are plain ustar with pinned metadata (mtime 0, uid/gid 0, mode
//! 0644) so identical inputs produce byte-identical files. Member names are
//! `m%05d.htmx` where the number is the matrix index within the window
//! (`archive_index * nmat_per_file + j`); archives are `w%04d_a%04d.tar`,
//! with subrange variants `w%04d_a%04d_r%02d.tar`. Lexicographic name order
//! therefore equals processing order.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use hypertm_core::TrafficMatrix;

use crate::store::{self, DecodeError};

pub fn member_name(matrix_index: usize) -> String {
    format!("m{:05}.htmx", matrix_index)
}

pub fn archive_name(window_id: usize, archive_index: usize) -> String {
    format!("w{:04}_a{:04}.tar", window_id, archive_index)
}

pub fn subrange_archive_name(window_id: usize, archive_index: usize, range_id: usize) -> String {
    format!("w{:04}_a{:04}_r{:02}.tar", window_id, archive_index, range_id)
}

/// What one written archive contains, in member order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveManifest {
    pub window_id: usize,
    pub archive_index: usize,
    pub members: Vec<String>,
}

#[derive(Debug)]
pub enum ArchiveError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A member decoded to an invalid matrix.
    Member {
        path: PathBuf,
        member: String,
        source: DecodeError,
    },
    MemberIo {
        path: PathBuf,
        member: String,
        source: std::io::Error,
    },
    /// Tar entry that is not a regular file.
    NotAFile { path: PathBuf, member: String },
    /// Member names must be strictly increasing (storage order == name order).
    OutOfOrder { path: PathBuf, member: String },
}

impl fmt::Display for ArchiveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArchiveError::Io { path, source } => {
                write!(f, "{}: {}", path.display(), source)
            }
            ArchiveError::Member {
                path,
                member,
                source,
            } => write!(f, "{}: member {}: {}", path.display(), member, source),
            ArchiveError::MemberIo {
                path,
                member,
                source,
            } => write!(f, "{}: member {}: {}", path.display(), member, source),
            ArchiveError::NotAFile { path, member } => {
                write!(f, "{}: member {} is not a regular file", path.display(), member)
            }
            ArchiveError::OutOfOrder { path, member } => write!(
                f,
                "{}: member {} breaks ascending name order",
                path.display(),
                member
            ),
        }
    }
}

impl std::error::Error for ArchiveError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ArchiveError::Io { source, .. } => Some(source),
            ArchiveError::Member { source, .. } => Some(source),
            ArchiveError::MemberIo { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// Writes `matrices` to a tar at `path`, one member per matrix in order.
/// `nmat_per_file` anchors member numbering at `archive_index * nmat_per_file`.
pub fn write_archive(
    matrices: &[TrafficMatrix],
    window_id: usize,
    archive_index: usize,
    nmat_per_file: usize,
    path: &Path,
) -> Result<ArchiveManifest, ArchiveError> {
    let io_err = |source| ArchiveError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut builder = tar::Builder::new(BufWriter::new(file));
    let mut members = Vec::with_capacity(matrices.len());
    for (j, m) in matrices.iter().enumerate() {
        let name = member_name(archive_index * nmat_per_file + j);
        let bytes = store::serialize_matrix(m);
        let mut header = tar::Header::new_ustar();
        header.set_entry_type(tar::EntryType::Regular);
        header.set_size(bytes.len() as u64);
        header.set_mode(0o644);
        header.set_mtime(0);
        header.set_uid(0);
        header.set_gid(0);
        builder
            .append_data(&mut header, &name, bytes.as_slice())
            .map_err(io_err)?;
        members.push(name);
    }
    let mut inner = builder.into_inner().map_err(io_err)?;
    inner.flush().map_err(io_err)?;
    Ok(ArchiveManifest {
        window_id,
        archive_index,
        members,
    })
}

/// Reads every member of the tar at `path` back into matrices, in member
/// order. Decodes one member at a time; errors name the failing member.
pub fn read_archive(path: &Path) -> Result<Vec<TrafficMatrix>, ArchiveError> {
    let io_err = |source| ArchiveError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let mut archive = tar::Archive::new(BufReader::new(file));
    let mut out = Vec::new();
    let mut last_name: Option<String> = None;
    for entry in archive.entries().map_err(io_err)? {
        let mut entry = entry.map_err(io_err)?;
        let member = entry.path().map_err(io_err)?.display().to_string();
        if entry.header().entry_type() != tar::EntryType::Regular {
            return Err(ArchiveError::NotAFile {
                path: path.to_path_buf(),
                member,
            });
        }
        if last_name.as_deref().is_some_and(|prev| member.as_str() <= prev) {
            return Err(ArchiveError::OutOfOrder {
                path: path.to_path_buf(),
                member,
            });
        }
        let mut buf = Vec::with_capacity(entry.size() as usize);
        entry.read_to_end(&mut buf).map_err(|source| ArchiveError::MemberIo {
            path: path.to_path_buf(),
            member: member.clone(),
            source,
        })?;
        let m = store::deserialize_matrix(&buf).map_err(|source| ArchiveError::Member {
            path: path.to_path_buf(),
            member: member.clone(),
            source,
        })?;
        last_name = Some(member);
        out.push(m);
    }
    Ok(out)
}
