#pragma once

// Shared plumbing for the HTTPS/JSON backends: credential lookup and a
// retry loop with exponential backoff and jitter.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace gptdetox::detail {

class NonRetryableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string require_api_key(const std::string& env_name) {
  const char* key = std::getenv(env_name.c_str());
  if (key == nullptr || *key == '\0') {
    throw NonRetryableError("missing credentials: environment variable " +
                            env_name + " is not set");
  }
  return key;
}

// Runs fn up to max_attempts times. fn throws NonRetryableError to abort
// immediately, any other exception to trigger a retry.
template <typename Fn>
auto with_retries(int max_attempts, double base_seconds, Fn&& fn) {
  std::mt19937_64 jitter_gen(std::random_device{}());
  std::uniform_real_distribution<double> jitter(0.0, 0.5);
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    try {
      return fn();
    } catch (const NonRetryableError&) {
      throw;
    } catch (const std::exception& e) {
      last_error = e.what();
      if (attempt == max_attempts) break;
      double delay = base_seconds * static_cast<double>(1 << (attempt - 1));
      delay *= 1.0 + jitter(jitter_gen);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
  }
  throw std::runtime_error("request failed after " +
                           std::to_string(max_attempts) +
                           " attempts: " + last_error);
}

}  // namespace gptdetox::detail
