// Test double for the external oracle protocol. Answers every request with a
// fixed (Q, R) pair, or with the synthetic surrogate when --corpus is given.
// Fault switches count answered requests.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "ftalloc/cost_model.hpp"
#include "ftalloc/harness.hpp"
#include "json.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ftalloc echo oracle"};
  double q = 1000.0;
  double r = 1.0;
  std::string corpus;
  long die_after = -1;
  long malformed_after = -1;
  long hang_after = -1;
  long error_after = -1;
  bool reentrant = false;
  bool bad_handshake = false;
  app.add_option("--q", q);
  app.add_option("--r", r);
  app.add_option("--corpus", corpus, "Answer with the synthetic model for these profiles");
  app.add_option("--die-after", die_after, "Exit after answering N requests");
  app.add_option("--malformed-after", malformed_after, "Send garbage after N requests");
  app.add_option("--hang-after", hang_after, "Stop answering after N requests");
  app.add_option("--error-after", error_after, "Reply with an error object after N requests");
  app.add_flag("--reentrant", reentrant);
  app.add_flag("--bad-handshake", bad_handshake);
  CLI11_PARSE(app, argc, argv);

  std::map<std::string, ftalloc::CircuitProfile> profiles;
  if (!corpus.empty()) {
    for (const auto& e : std::filesystem::directory_iterator(corpus)) {
      if (e.path().extension() != ".json") continue;
      auto p = ftalloc::load_profile(e.path());
      profiles.emplace(p.name, p);
    }
  }

  if (bad_handshake) {
    std::cout << "{\"protocol\":\"something-else/9\"}" << std::endl;
  } else {
    std::cout << nlohmann::json{{"protocol", "ftalloc-oracle/1"}, {"reentrant", reentrant}}.dump()
              << std::endl;
  }

  ftalloc::SyntheticOracle synthetic;
  long answered = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (die_after >= 0 && answered >= die_after) return 3;
    if (hang_after >= 0 && answered >= hang_after) {
      std::this_thread::sleep_for(std::chrono::hours(1));
    }
    if (malformed_after >= 0 && answered >= malformed_after) {
      std::cout << "this is not json" << std::endl;
      ++answered;
      continue;
    }
    if (error_after >= 0 && answered >= error_after) {
      std::cout << "{\"error\":\"estimator rejected budget\"}" << std::endl;
      ++answered;
      continue;
    }
    nlohmann::json reply;
    if (profiles.empty()) {
      reply = {{"Q", q}, {"R_seconds", r}};
    } else {
      const auto req = nlohmann::json::parse(line);
      const auto it = profiles.find(req.at("profile").get<std::string>());
      if (it == profiles.end()) {
        reply = {{"error", "unknown profile"}};
      } else {
        const auto s = req.at("s");
        ftalloc::GameConfig cfg;
        cfg.epsilon_total = req.at("epsilon_total").get<double>();
        const auto alloc = ftalloc::clip_renormalize(
            {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()}, cfg.eps_min);
        const auto est = synthetic.evaluate(alloc, it->second, cfg);
        if (est) {
          reply = {{"Q", est->physical_qubits}, {"R_seconds", est->runtime_seconds}};
        } else {
          reply = {{"error", "infeasible budget"}};
        }
      }
    }
    std::cout << reply.dump() << std::endl;
    ++answered;
  }
  return 0;
}
