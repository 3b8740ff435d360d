#pragma once

// Annotation service: hands out segments to human annotators and keeps their
// labels in an append-only journal (annotations.jsonl, labels.jsonl schema
// plus annotator and round).
//
// AnnotationService holds the logic and is usable without a socket;
// AnnotationServer wires it to HTTP routes.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "reliance/model.hpp"
#include "reliance/records.hpp"
#include "reliance/segmenter.hpp"

namespace httplib {
class Server;
}

namespace reliance {

inline constexpr const char* kAnnotationJournal = "annotations.jsonl";
inline constexpr int kDefaultPort = 7340;

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

class AnnotationService {
public:
    AnnotationService(Corpus corpus, std::vector<InteractionSegment> segments, std::filesystem::path journal);

    ApiResponse list_segments(std::optional<int> round, std::optional<std::string> annotator) const;
    ApiResponse get_segment(const std::string& id, std::optional<std::string> annotator, bool adjudication) const;
    ApiResponse post_label(const std::string& id, std::optional<std::string> annotator, const std::string& body);
    ApiResponse agreement(std::optional<int> round) const;
    ApiResponse export_labels(std::optional<int> round) const;

    /// Immutable view of the journal at the time of the call.
    std::shared_ptr<const std::vector<LabelRecord>> snapshot() const;
    const std::filesystem::path& journal() const { return journal_; }

private:
    const InteractionSegment* find(const std::string& id) const;

    Corpus corpus_;
    std::vector<InteractionSegment> segments_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, std::vector<bool>> pasted_from_response_;  // per session, per copy
    std::filesystem::path journal_;

    mutable std::mutex snapshot_mu_;  // guards the pointer swap only
    std::shared_ptr<const std::vector<LabelRecord>> records_;
    std::mutex writer_mu_;            // serialises POSTs
    std::string journal_text_;
};

/// Loads the corpus and the segments written by the segment stage in `state`
/// and opens (or creates) the journal there.
std::unique_ptr<AnnotationService> open_annotation_service(const std::filesystem::path& corpus,
                                                           const std::filesystem::path& state);

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = kDefaultPort;  // 0 picks a free port
    std::optional<std::filesystem::path> static_dir;
};

class AnnotationServer {
public:
    AnnotationServer(AnnotationService& service, ServerOptions options);
    ~AnnotationServer();

    /// Binds the socket and returns the port in use.
    int bind();
    /// Serves until stop() is called. bind() must have succeeded.
    void run();
    void stop();

private:
    AnnotationService& service_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> http_;
};

}  // namespace reliance
