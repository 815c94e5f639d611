#include "fudge/error.hpp"

namespace fudge {

namespace {

std::string compose(ErrorKind kind, const std::string& subject, const std::string& detail) {
    std::string msg(to_string(kind));
    if (!subject.empty()) {
        msg += " '" + subject + "'";
    }
    if (!detail.empty()) {
        msg += ": " + detail;
    }
    return msg;
}

} // namespace

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::DanglingBucketRef: return "DanglingBucketRef";
    case ErrorKind::UnreachableNode: return "UnreachableNode";
    case ErrorKind::EmptyBucket: return "EmptyBucket";
    case ErrorKind::DuplicateNodeId: return "DuplicateNodeId";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::InvalidRoot: return "InvalidRoot";
    case ErrorKind::NoLeaf: return "NoLeaf";
    case ErrorKind::InvalidPath: return "InvalidPath";
    case ErrorKind::EmptyText: return "EmptyText";
    case ErrorKind::DuplicateDialogueId: return "DuplicateDialogueId";
    case ErrorKind::DuplicateUtteranceId: return "DuplicateUtteranceId";
    case ErrorKind::DuplicateBucketId: return "DuplicateBucketId";
    case ErrorKind::UnknownActor: return "UnknownActor";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::MissingEmbedding: return "MissingEmbedding";
    case ErrorKind::DegenerateCentroid: return "DegenerateCentroid";
    case ErrorKind::NoCandidateBucket: return "NoCandidateBucket";
    case ErrorKind::PathExplosion: return "PathExplosion";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::UnknownDialogue: return "UnknownDialogue";
    }
    return "Error";
}

Error::Error(ErrorKind kind, std::string subject, const std::string& detail)
    : std::runtime_error(compose(kind, subject, detail)), kind_(kind), subject_(std::move(subject)) {}

std::string_view version() { return FUDGE_VERSION; }

} // namespace fudge
