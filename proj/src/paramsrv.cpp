#include "swarmrl/paramsrv.hpp"

#include <algorithm>
#include <cmath>

namespace swarmrl {

ParameterServer::ParameterServer(std::size_t queue_capacity)
    : queue_capacity_(queue_capacity) {
  if (queue_capacity == 0)
    throw ConfigError("ParameterServer: queue capacity must be positive");
  best_ = std::make_shared<const BestRecord>();
}

bool ParameterServer::submit_candidate(Candidate cand) {
  if (!std::isfinite(cand.claimed_score)) {
    std::lock_guard lk(queue_mu_);
    ++rejected_;
    return false;
  }
  const double best_score = read_best()->score;
  std::lock_guard lk(queue_mu_);
  ++submissions_;
  if (!(cand.claimed_score > best_score)) {
    ++rejected_;
    return false;
  }
  cand.id = next_candidate_id_++;
  queue_.push_back(std::move(cand));
  if (queue_.size() > queue_capacity_) {
    auto lowest = std::min_element(
        queue_.begin(), queue_.end(),
        [](const Candidate& a, const Candidate& b) { return a.claimed_score < b.claimed_score; });
    queue_.erase(lowest);
  }
  return true;
}

std::optional<Candidate> ParameterServer::take_candidate() {
  std::lock_guard lk(queue_mu_);
  if (queue_.empty()) return std::nullopt;
  auto highest = std::max_element(
      queue_.begin(), queue_.end(),
      [](const Candidate& a, const Candidate& b) { return a.claimed_score < b.claimed_score; });
  Candidate out = std::move(*highest);
  queue_.erase(highest);
  return out;
}

std::optional<std::int64_t> ParameterServer::commit_best(
    std::vector<ParamVector> params, double score, double c, std::int64_t x,
    int source_agent, std::int64_t step, std::int64_t candidate_id) {
  std::lock_guard lk(best_mu_);
  if (!(score >= best_->score)) return std::nullopt;
  auto rec = std::make_shared<BestRecord>();
  rec->version = best_->version + 1;
  rec->params = std::move(params);
  rec->score = score;
  rec->c = c;
  rec->x = x;
  best_ = rec;
  log_.push_back({rec->version, step, score, c, x, source_agent, candidate_id});
  return rec->version;
}

std::shared_ptr<const BestRecord> ParameterServer::read_best() const {
  std::lock_guard lk(best_mu_);
  return best_;
}

std::vector<CommitEntry> ParameterServer::commit_log() const {
  std::lock_guard lk(best_mu_);
  return log_;
}

std::int64_t ParameterServer::submissions() const {
  std::lock_guard lk(queue_mu_);
  return submissions_;
}

std::int64_t ParameterServer::rejected_submissions() const {
  std::lock_guard lk(queue_mu_);
  return rejected_;
}

}  // namespace swarmrl
