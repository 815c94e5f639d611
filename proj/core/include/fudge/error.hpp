#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fudge {

enum class ErrorKind {
    Parse,
    Io,
    CycleDetected,
    DanglingBucketRef,
    UnreachableNode,
    EmptyBucket,
    DuplicateNodeId,
    DuplicateEdge,
    UnknownNode,
    InvalidRoot,
    NoLeaf,
    InvalidPath,
    EmptyText,
    DuplicateDialogueId,
    DuplicateUtteranceId,
    DuplicateBucketId,
    UnknownActor,
    DimensionMismatch,
    ZeroVector,
    MissingEmbedding,
    DegenerateCentroid,
    NoCandidateBucket,
    PathExplosion,
    EmptyCorpus,
    InvalidConfig,
    UnknownDialogue,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `subject()` carries the offending id
/// (node, bucket, dialogue, embedding key, ...) when one exists.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string subject, const std::string& detail = {});

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    ErrorKind kind_;
    std::string subject_;
};

/// Library version string, echoed into every report.
std::string_view version();

} // namespace fudge
