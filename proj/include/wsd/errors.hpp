#pragma once

#include <stdexcept>
#include <string>

namespace wsd {

struct WsdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input/config problems the user can fix (CLI exit code 2).
struct InputError : WsdError {
    using WsdError::WsdError;
};

struct MalformedLineError : InputError {
    MalformedLineError(const std::string& file, std::size_t line_no, const std::string& what)
        : InputError(file + ":" + std::to_string(line_no) + ": " + what),
          file(file), line_no(line_no) {}
    std::string file;
    std::size_t line_no;
};

struct DanglingKeyError : InputError {
    explicit DanglingKeyError(const std::string& sense_key)
        : InputError("sense key references unknown synset: " + sense_key), sense_key(sense_key) {}
    std::string sense_key;
};

struct XmlStructureError : InputError {
    XmlStructureError(const std::string& what, const std::string& location)
        : InputError(what + " at " + location) {}
};

struct MissingGoldError : InputError {
    explicit MissingGoldError(const std::string& instance_id)
        : InputError("instance has no gold key: " + instance_id), instance_id(instance_id) {}
    std::string instance_id;
};

struct NoCandidatesError : WsdError {
    NoCandidatesError(const std::string& lemma, const std::string& pos)
        : WsdError("no sense candidates for " + lemma + "/" + pos), lemma(lemma) {}
    std::string lemma;
};

struct NoPredictionPossibleError : WsdError {
    explicit NoPredictionPossibleError(const std::string& instance_id)
        : WsdError("no prediction possible for " + instance_id) {}
};

struct IoError : WsdError {
    using WsdError::WsdError;
};

struct MtUnavailableError : WsdError {
    MtUnavailableError(const std::string& hop, const std::string& cause)
        : WsdError("MT unavailable on hop " + hop + ": " + cause), hop(hop) {}
    std::string hop;
};

struct MtMalformedResponseError : WsdError {
    using WsdError::WsdError;
};

struct ShapeMismatchError : WsdError {
    using WsdError::WsdError;
};

struct MalformedExampleError : WsdError {
    MalformedExampleError(const std::string& task, const std::string& missing)
        : WsdError("malformed " + task + " example: missing " + missing) {}
};

struct VersionMismatchError : WsdError {
    using WsdError::WsdError;
};

struct MissingArtifactError : InputError {
    MissingArtifactError(const std::string& stage, const std::string& path)
        : InputError(stage + ": missing required artifact " + path) {}
};

}  // namespace wsd
