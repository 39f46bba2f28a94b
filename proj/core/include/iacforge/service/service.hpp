#pragma once

#include <memory>
#include <string>

namespace iacforge::service {

inline constexpr int kBatchItemCap = 256;

// Stateless HTTP front end over verification and reward scoring.
//   GET  /healthz          -> 200 "ok"
//   POST /v1/verify        {config, stage: "FV1"|"FV2"} -> verdict report
//   POST /v1/reward        {config, policy} -> reward breakdown
//   POST /v1/reward/batch  {items: [{config, policy}], group: bool}
// Malformed bodies get 400, an empty policy 422, oversized batches 413.
class RewardService {
 public:
  RewardService();
  ~RewardService();
  RewardService(const RewardService&) = delete;
  RewardService& operator=(const RewardService&) = delete;

  // Serves on host:port until stop(); false when the bind fails.
  bool run(const std::string& host, int port);

  // Binds an OS-assigned port and serves on a background thread.
  // Returns the bound port, or -1 when the bind fails.
  int start_background(const std::string& host);

  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace iacforge::service
