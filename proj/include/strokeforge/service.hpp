// Copyright 2026 The StrokeForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// HTTP front end for the restoration pipeline.
//
//   POST /images                 raw PNG/PGM body (or multipart field "file") -> {"id"}
//   POST /jobs                   {"image_id", "points", "params"} -> {"job_id"}
//   GET  /jobs/{id}              job record with every snapshot
//   GET  /jobs/{id}/events       server-sent events, replay then live tail
//   GET  /jobs/{id}/mask.png
//   GET  /jobs/{id}/spline.json
//   GET  /jobs/{id}/trace.csv
//   GET  /healthz
//
// Needs OpenSSL's libcrypto for the content hash.

#include <strokeforge/error.hpp>
#include <strokeforge/image.hpp>
#include <strokeforge/restore.hpp>
#include <strokeforge/spline.hpp>

#include <openssl/evp.h>

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <span>
#include <sstream>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

namespace strokeforge::service {

inline constexpr std::size_t kMaxImageBytes = 32u * 1024u * 1024u;

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8787;
    std::optional<std::filesystem::path> dataDir;

    /// STROKEFORGE_ADDR (host:port) and STROKEFORGE_DATA_DIR.
    static ServiceConfig from_env() {
        ServiceConfig c;
        if (const char* addr = std::getenv("STROKEFORGE_ADDR"); addr && *addr) {
            const std::string a = addr;
            const auto colon = a.rfind(':');
            if (colon == std::string::npos) {
                throwInput("STROKEFORGE_ADDR must be host:port, got \"" + a + "\"");
            }
            c.host = a.substr(0, colon);
            try {
                c.port = std::stoi(a.substr(colon + 1));
            } catch (const std::exception&) {
                throwInput("STROKEFORGE_ADDR has a bad port: \"" + a + "\"");
            }
        }
        if (const char* dir = std::getenv("STROKEFORGE_DATA_DIR"); dir && *dir) {
            c.dataDir = std::filesystem::path(dir);
        }
        return c;
    }
};

inline std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throwNumeric("SHA-256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int k = 0; k < len; ++k) {
        out.push_back(kHex[digest[k] >> 4]);
        out.push_back(kHex[digest[k] & 0xf]);
    }
    return out;
}

enum class JobStatus { Queued, Running, Done, Failed };

inline const char* to_string(JobStatus s) {
    switch (s) {
        case JobStatus::Queued: return "queued";
        case JobStatus::Running: return "running";
        case JobStatus::Done: return "done";
        case JobStatus::Failed: return "failed";
    }
    return "failed";
}

inline JobStatus job_status_from_string(const std::string& s) {
    if (s == "queued") return JobStatus::Queued;
    if (s == "running") return JobStatus::Running;
    if (s == "done") return JobStatus::Done;
    if (s == "failed") return JobStatus::Failed;
    throwInput("unknown job status \"" + s + "\"");
}

inline bool is_terminal(JobStatus s) { return s == JobStatus::Done || s == JobStatus::Failed; }

inline nlohmann::json energy_to_json(const EnergyBreakdown& e) {
    return {{"f_total", e.total}, {"f_fid_s", e.fidelityS}, {"f_fid_r", e.fidelityR}, {"f_curv", e.curvature}};
}

inline EnergyBreakdown energy_from_json(const nlohmann::json& j) {
    EnergyBreakdown e;
    e.total = j.at("f_total").get<double>();
    e.fidelityS = j.at("f_fid_s").get<double>();
    e.fidelityR = j.at("f_fid_r").get<double>();
    e.curvature = j.at("f_curv").get<double>();
    return e;
}

struct Snapshot {
    int iteration = 0;
    EnergyBreakdown energy;
    std::string spline;  // spline JSON text
};

inline nlohmann::json snapshot_to_json(const Snapshot& s) {
    return {{"iteration", s.iteration}, {"energy", energy_to_json(s.energy)}, {"spline", nlohmann::json::parse(s.spline)}};
}

/// Plain job data. Snapshots only ever grow; status never leaves a terminal
/// state.
struct JobRecord {
    std::string id;
    std::string imageId;
    nlohmann::json points;
    nlohmann::json params;
    JobStatus status = JobStatus::Queued;
    std::vector<Snapshot> snapshots;
    std::string error;
    Bytes maskPng;
    std::string splineJson;
    std::string traceCsv;

    nlohmann::json to_json(bool withSnapshots = true) const {
        nlohmann::json j = {{"id", id},
                            {"image_id", imageId},
                            {"points", points},
                            {"params", params},
                            {"status", to_string(status)},
                            {"iterations", snapshots.size()}};
        if (!error.empty()) {
            j["error"] = error;
        }
        if (withSnapshots) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& s : snapshots) {
                arr.push_back(snapshot_to_json(s));
            }
            j["snapshots"] = std::move(arr);
        }
        if (status == JobStatus::Done) {
            j["results"] = {{"mask", "/jobs/" + id + "/mask.png"},
                            {"spline", "/jobs/" + id + "/spline.json"},
                            {"trace", "/jobs/" + id + "/trace.csv"}};
        }
        return j;
    }
};

/// A live job: the record plus its lock and wake-up signal.
class Job {
public:
    explicit Job(JobRecord rec) : rec_(std::move(rec)) {}

    JobRecord snapshot() const {
        std::shared_lock lock(mu_);
        return rec_;
    }

    JobStatus status() const {
        std::shared_lock lock(mu_);
        return rec_.status;
    }

    void setRunning() { mutate([](JobRecord& r) { r.status = JobStatus::Running; }); }

    void append(Snapshot s) {
        mutate([&](JobRecord& r) { r.snapshots.push_back(std::move(s)); });
    }

    void finish(Bytes mask, std::string spline, std::string trace) {
        mutate([&](JobRecord& r) {
            r.maskPng = std::move(mask);
            r.splineJson = std::move(spline);
            r.traceCsv = std::move(trace);
            r.status = JobStatus::Done;
        });
    }

    void fail(std::string message) {
        mutate([&](JobRecord& r) {
            r.error = std::move(message);
            r.status = JobStatus::Failed;
        });
    }

    /// Waits until there are more than `seen` snapshots or the job is
    /// terminal, up to `timeout`. Returns the snapshots past `seen` and the
    /// status observed.
    std::pair<std::vector<Snapshot>, JobStatus> waitPast(std::size_t seen, std::chrono::milliseconds timeout) const {
        std::unique_lock lock(waitMu_);
        cv_.wait_for(lock, timeout, [&] {
            std::shared_lock rl(mu_);
            return rec_.snapshots.size() > seen || is_terminal(rec_.status);
        });
        std::shared_lock rl(mu_);
        std::vector<Snapshot> fresh;
        for (std::size_t k = seen; k < rec_.snapshots.size(); ++k) {
            fresh.push_back(rec_.snapshots[k]);
        }
        return {std::move(fresh), rec_.status};
    }

private:
    template <class F>
    void mutate(F&& f) {
        {
            std::unique_lock lock(mu_);
            if (is_terminal(rec_.status)) {
                return;
            }
            f(rec_);
        }
        {
            std::lock_guard lock(waitMu_);
        }
        cv_.notify_all();
    }

    mutable std::shared_mutex mu_;
    mutable std::mutex waitMu_;
    mutable std::condition_variable cv_;
    JobRecord rec_;
};

// ---------------------------------------------------------------------------

/// Content-addressed image bytes, kept in memory and mirrored to
/// <dataDir>/images/<id> when persistence is on.
class ImageStore {
public:
    explicit ImageStore(std::optional<std::filesystem::path> dir = std::nullopt) : dir_(std::move(dir)) {
        if (dir_) {
            std::filesystem::create_directories(*dir_ / "images");
        }
    }

    /// Validates and stores; returns the SHA-256 id.
    std::string put(std::span<const std::uint8_t> bytes) {
        if (bytes.size() > kMaxImageBytes) {
            throwInput("image exceeds 32 MiB");
        }
        GrayImage img = load_gray(bytes);
        const std::string id = sha256_hex(bytes);
        std::unique_lock lock(mu_);
        if (!images_.count(id)) {
            images_.emplace(id, std::make_shared<const GrayImage>(std::move(img)));
            if (dir_) {
                write_file((*dir_ / "images" / id).string(), bytes);
            }
        }
        return id;
    }

    std::shared_ptr<const GrayImage> get(const std::string& id) {
        {
            std::shared_lock lock(mu_);
            if (auto it = images_.find(id); it != images_.end()) {
                return it->second;
            }
        }
        if (!dir_ || id.size() != 64 || id.find_first_not_of("0123456789abcdef") != std::string::npos) {
            return nullptr;
        }
        const auto path = *dir_ / "images" / id;
        if (!std::filesystem::exists(path)) {
            return nullptr;
        }
        auto img = std::make_shared<const GrayImage>(load_gray(read_file(path.string())));
        std::unique_lock lock(mu_);
        return images_.emplace(id, img).first->second;
    }

private:
    std::optional<std::filesystem::path> dir_;
    std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<const GrayImage>> images_;
};

// ---------------------------------------------------------------------------

/// Request params beyond the restore options: input polarity and contrast
/// stretch percentiles ("stretch": [lo, hi], or null to skip).
struct JobInput {
    RestoreOptions options;
    bool invert = false;
    std::optional<std::pair<double, double>> stretch = std::pair{1.0, 99.0};
};

inline JobInput job_input_from_json(const nlohmann::json& params) {
    JobInput in;
    in.options = options_from_json(params);
    if (params.is_object()) {
        if (params.contains("invert")) {
            if (!params.at("invert").is_boolean()) {
                throwInput("param invert must be a boolean");
            }
            in.invert = params.at("invert").get<bool>();
        }
        if (params.contains("stretch")) {
            const auto& s = params.at("stretch");
            if (s.is_null()) {
                in.stretch.reset();
            } else if (s.is_array() && s.size() == 2 && s[0].is_number() && s[1].is_number()) {
                in.stretch = std::pair{s[0].get<double>(), s[1].get<double>()};
            } else {
                throwInput("param stretch must be [lo, hi] or null");
            }
        }
    }
    return in;
}

class JobStore {
public:
    JobStore(ImageStore& images, std::optional<std::filesystem::path> dir = std::nullopt)
        : images_(images), dir_(std::move(dir)) {
        if (dir_) {
            std::filesystem::create_directories(*dir_ / "jobs");
            load();
        }
    }

    ~JobStore() {
        std::vector<std::jthread> workers;
        {
            std::lock_guard lock(workersMu_);
            workers.swap(workers_);
        }
        for (auto& w : workers) {
            w.request_stop();
        }
        workers.clear();
    }

    JobStore(const JobStore&) = delete;
    JobStore& operator=(const JobStore&) = delete;

    /// Validates the request and starts the job on its own worker.
    std::string submit(const std::string& imageId, const nlohmann::json& pointsDoc, const nlohmann::json& params) {
        auto img = images_.get(imageId);
        if (!img) {
            throw std::out_of_range("unknown image " + imageId);
        }
        const nlohmann::json wrapped = pointsDoc.is_array() ? nlohmann::json{{"points", pointsDoc}} : pointsDoc;
        const SamplePointSet points = points_from_json(wrapped);
        validate_points(points, bounds_of(*img));
        const JobInput input = job_input_from_json(params);
        input.options.energy.validate();
        input.options.descent.validate();

        JobRecord rec;
        rec.id = newId();
        rec.imageId = imageId;
        rec.points = points_to_json(points).at("points");
        rec.params = params.is_null() ? nlohmann::json::object() : params;
        auto job = std::make_shared<Job>(rec);
        {
            std::unique_lock lock(mu_);
            jobs_.emplace(rec.id, job);
        }
        persist(*job);

        std::lock_guard lock(workersMu_);
        workers_.emplace_back([this, job, img, points, input](std::stop_token stop) {
            run(stop, *job, *img, points, input);
        });
        return rec.id;
    }

    std::shared_ptr<Job> get(const std::string& id) const {
        std::shared_lock lock(mu_);
        auto it = jobs_.find(id);
        return it == jobs_.end() ? nullptr : it->second;
    }

private:
    void run(std::stop_token stop, Job& job, const GrayImage& raw, const SamplePointSet& points,
             const JobInput& input) {
        try {
            job.setRunning();
            GrayImage img = raw;
            if (input.invert) {
                for (int q = 0; q < img.height(); ++q) {
                    for (int p = 0; p < img.width(); ++p) {
                        img.set(p, q, 1.0 - img.at(p, q));
                    }
                }
            }
            if (input.stretch) {
                img = histogram_stretch(img, input.stretch->first, input.stretch->second);
            }
            const auto observe = [&](int iteration, const EnergyBreakdown& e, const SplineCurve& curve) {
                if (stop.stop_requested()) {
                    throwInput("job cancelled at shutdown");
                }
                job.append({iteration, e, spline_to_json(curve)});
            };
            const RestorationResult result = restore(img, points, input.options, observe);
            job.finish(encode_mask_png(result.mask), spline_to_json(result.curve), trace_to_csv(result.trace));
        } catch (const std::exception& e) {
            job.fail(e.what());
        }
        persist(job);
    }

    std::string newId() {
        std::lock_guard lock(rngMu_);
        std::uniform_int_distribution<std::uint64_t> dist;
        std::ostringstream os;
        os << std::hex;
        os.width(16);
        os.fill('0');
        os << dist(rng_);
        return os.str();
    }

    void persist(const Job& job) const {
        if (!dir_) {
            return;
        }
        const JobRecord rec = job.snapshot();
        nlohmann::json j = rec.to_json();
        j.erase("results");
        if (rec.status == JobStatus::Done) {
            j["spline_json"] = rec.splineJson;
            j["trace_csv"] = rec.traceCsv;
            write_file((*dir_ / "jobs" / (rec.id + ".mask.png")).string(), rec.maskPng);
        }
        const std::string text = j.dump();
        const auto tmp = *dir_ / "jobs" / (rec.id + ".json.tmp");
        write_file(tmp.string(), std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
        std::filesystem::rename(tmp, *dir_ / "jobs" / (rec.id + ".json"));
    }

    // Jobs interrupted by a restart come back as failed.
    void load() {
        for (const auto& entry : std::filesystem::directory_iterator(*dir_ / "jobs")) {
            if (entry.path().extension() != ".json") {
                continue;
            }
            try {
                const Bytes raw = read_file(entry.path().string());
                const auto j = nlohmann::json::parse(raw.begin(), raw.end());
                JobRecord rec;
                rec.id = j.at("id").get<std::string>();
                rec.imageId = j.at("image_id").get<std::string>();
                rec.points = j.at("points");
                rec.params = j.at("params");
                rec.status = job_status_from_string(j.at("status").get<std::string>());
                rec.error = j.value("error", "");
                for (const auto& s : j.at("snapshots")) {
                    rec.snapshots.push_back(
                        {s.at("iteration").get<int>(), energy_from_json(s.at("energy")), spline_to_json(spline_from_json(s.at("spline")))});
                }
                if (rec.status == JobStatus::Done) {
                    rec.splineJson = j.at("spline_json").get<std::string>();
                    rec.traceCsv = j.at("trace_csv").get<std::string>();
                    rec.maskPng = read_file((*dir_ / "jobs" / (rec.id + ".mask.png")).string());
                } else if (rec.status != JobStatus::Failed) {
                    rec.status = JobStatus::Failed;
                    rec.error = "interrupted by a service restart";
                }
                std::string id = rec.id;
                jobs_.emplace(std::move(id), std::make_shared<Job>(std::move(rec)));
            } catch (const std::exception&) {
                // Unreadable records are skipped.
            }
        }
    }

    ImageStore& images_;
    std::optional<std::filesystem::path> dir_;
    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Job>> jobs_;
    std::mutex rngMu_;
    std::mt19937_64 rng_{std::random_device{}()};
    std::mutex workersMu_;
    std::vector<std::jthread> workers_;
};

// ---------------------------------------------------------------------------

inline std::string sse_event(const std::string& name, const nlohmann::json& data) {
    return "event: " + name + "\ndata: " + data.dump() + "\n\n";
}

class Service {
public:
    explicit Service(ServiceConfig config = {})
        : config_(std::move(config)), images_(config_.dataDir), jobs_(images_, config_.dataDir) {
        routes();
    }

    ~Service() { stop(); }

    httplib::Server& server() { return server_; }
    ImageStore& images() { return images_; }
    JobStore& jobs() { return jobs_; }
    const ServiceConfig& config() const { return config_; }

    /// Blocks serving on the configured address.
    bool listen() { return server_.listen(config_.host, config_.port); }

    void stop() { server_.stop(); }

private:
    static void sendError(httplib::Response& res, int status, const std::string& message) {
        res.status = status;
        res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
    }

    std::shared_ptr<Job> jobOr404(const httplib::Request& req, httplib::Response& res) {
        auto job = jobs_.get(req.matches[1]);
        if (!job) {
            sendError(res, 404, "unknown job " + std::string(req.matches[1]));
        }
        return job;
    }

    void routes() {
        server_.set_payload_max_length(kMaxImageBytes + 64 * 1024);

        server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"status":"ok"})", "application/json");
        });

        server_.Post("/images", [this](const httplib::Request& req, httplib::Response& res) {
            std::string body = req.body;
            if (req.is_multipart_form_data()) {
                if (!req.has_file("file")) {
                    return sendError(res, 400, "multipart upload needs a \"file\" field");
                }
                body = req.get_file_value("file").content;
            }
            if (body.size() > kMaxImageBytes) {
                return sendError(res, 413, "image exceeds 32 MiB");
            }
            try {
                const std::string id =
                    images_.put(std::span(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
                res.status = 201;
                res.set_content(nlohmann::json{{"id", id}}.dump(), "application/json");
            } catch (const Error& e) {
                sendError(res, 415, e.what());
            }
        });

        server_.Post("/jobs", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(req.body);
            } catch (const nlohmann::json::exception& e) {
                return sendError(res, 400, std::string("request body is not JSON: ") + e.what());
            }
            if (!doc.is_object() || !doc.contains("image_id") || !doc.at("image_id").is_string() ||
                !doc.contains("points")) {
                return sendError(res, 400, "job needs \"image_id\" and \"points\"");
            }
            try {
                const std::string id = jobs_.submit(doc.at("image_id").get<std::string>(), doc.at("points"),
                                                    doc.value("params", nlohmann::json::object()));
                res.status = 202;
                res.set_content(nlohmann::json{{"job_id", id}}.dump(), "application/json");
            } catch (const std::out_of_range& e) {
                sendError(res, 404, e.what());
            } catch (const Error& e) {
                sendError(res, 400, e.what());
            } catch (const nlohmann::json::exception& e) {
                sendError(res, 400, e.what());
            }
        });

        server_.Get(R"(/jobs/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
            if (auto job = jobOr404(req, res)) {
                res.set_content(job->snapshot().to_json().dump(), "application/json");
            }
        });

        server_.Get(R"(/jobs/([0-9a-f]+)/mask\.png)", [this](const httplib::Request& req, httplib::Response& res) {
            if (auto job = jobOr404(req, res)) {
                const JobRecord rec = job->snapshot();
                if (rec.status != JobStatus::Done) {
                    return sendError(res, 409, std::string("job is ") + to_string(rec.status));
                }
                res.set_content(std::string(rec.maskPng.begin(), rec.maskPng.end()), "image/png");
            }
        });

        server_.Get(R"(/jobs/([0-9a-f]+)/spline\.json)", [this](const httplib::Request& req, httplib::Response& res) {
            if (auto job = jobOr404(req, res)) {
                const JobRecord rec = job->snapshot();
                if (rec.status != JobStatus::Done) {
                    return sendError(res, 409, std::string("job is ") + to_string(rec.status));
                }
                res.set_content(rec.splineJson, "application/json");
            }
        });

        server_.Get(R"(/jobs/([0-9a-f]+)/trace\.csv)", [this](const httplib::Request& req, httplib::Response& res) {
            if (auto job = jobOr404(req, res)) {
                const JobRecord rec = job->snapshot();
                if (rec.status != JobStatus::Done) {
                    return sendError(res, 409, std::string("job is ") + to_string(rec.status));
                }
                res.set_content(rec.traceCsv, "text/csv");
            }
        });

        server_.Get(R"(/jobs/([0-9a-f]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
            auto job = jobOr404(req, res);
            if (!job) {
                return;
            }
            auto seen = std::make_shared<std::size_t>(0);
            res.set_header("Cache-Control", "no-cache");
            res.set_chunked_content_provider("text/event-stream", [job, seen](std::size_t, httplib::DataSink& sink) {
                auto [fresh, status] = job->waitPast(*seen, std::chrono::milliseconds(250));
                for (const auto& s : fresh) {
                    const std::string ev = sse_event("iteration", snapshot_to_json(s));
                    if (!sink.write(ev.data(), ev.size())) {
                        return false;
                    }
                    ++*seen;
                }
                if (is_terminal(status) && fresh.empty()) {
                    const JobRecord rec = job->snapshot();
                    if (*seen < rec.snapshots.size()) {
                        return true;
                    }
                    const std::string ev =
                        rec.status == JobStatus::Done
                            ? sse_event("done", {{"status", "done"}, {"iterations", rec.snapshots.size()}})
                            : sse_event("failed", {{"status", "failed"}, {"error", rec.error}});
                    sink.write(ev.data(), ev.size());
                    sink.done();
                }
                return true;
            });
        });
    }

    ServiceConfig config_;
    ImageStore images_;
    JobStore jobs_;
    httplib::Server server_;
};

}  // namespace strokeforge::service
