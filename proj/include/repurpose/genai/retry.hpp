#pragma once

#include "repurpose/error.hpp"
#include "repurpose/genai/config.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <thread>

namespace repurpose::genai {

class BackendUnavailable : public Error {
public:
    BackendUnavailable(std::string stage, int attempts, const std::string& cause)
        : Error(ErrorKind::BackendUnavailable,
                stage + " failed after " + std::to_string(attempts) + " attempt(s): " + cause),
          stage_(std::move(stage)), attempts_(attempts), cause_(cause)
    {
    }

    const std::string& stage() const noexcept { return stage_; }
    int attempts() const noexcept { return attempts_; }
    const std::string& cause() const noexcept { return cause_; }

private:
    std::string stage_;
    int attempts_;
    std::string cause_;
};

struct RetryPolicy {
    double base_delay_s = 0.5;
    double factor = 2.0;
    double max_jitter = 0.1; ///< delays are stretched by up to this fraction
    std::uint64_t jitter_seed = 0x5eed;
    /// Injected so tests can observe backoff without waiting.
    std::function<void(double seconds)> sleep = [](double s) {
        std::this_thread::sleep_for(std::chrono::duration<double>(s));
    };
};

/// Delay before retry number `retry` (1-based) without jitter.
inline double backoff_delay(const RetryPolicy& p, int retry)
{
    return p.base_delay_s * std::pow(p.factor, retry - 1);
}

/// Runs `attempt` up to 1 + endpoint.max_retries times and returns the first
/// result. Any exception from an attempt counts as a failure.
template <typename Attempt>
auto call_with_retries(const BackendEndpoint& endpoint, const std::string& stage, Attempt&& attempt,
                       const RetryPolicy& policy = {}) -> decltype(attempt())
{
    std::mt19937_64 rng(policy.jitter_seed);
    std::uniform_real_distribution<double> jitter(0.0, policy.max_jitter);
    const int attempts = 1 + std::max(0, endpoint.max_retries);
    std::string last_cause = "no attempt made";
    for (int i = 0; i < attempts; ++i) {
        if (i > 0 && policy.sleep)
            policy.sleep(backoff_delay(policy, i) * (1.0 + jitter(rng)));
        try {
            return attempt();
        } catch (const std::exception& e) {
            last_cause = e.what();
        }
    }
    throw BackendUnavailable(stage, attempts, last_cause);
}

} // namespace repurpose::genai
