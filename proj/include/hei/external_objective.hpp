#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

#include "hei/driver.hpp"

namespace hei {

inline constexpr double kDefaultObjectiveTimeout = 600.0;

/// A long-lived child process speaking the line protocol: one line of
/// space-separated coordinates in, one number out. The command runs under
/// /bin/sh -c and is spawned on the first evaluation.
class ExternalProcess {
 public:
  ExternalProcess(std::string command, double timeout_seconds = kDefaultObjectiveTimeout);
  ~ExternalProcess();
  ExternalProcess(const ExternalProcess&) = delete;
  ExternalProcess& operator=(const ExternalProcess&) = delete;

  /// Throws ObjectiveError on spawn failure, timeout, child exit or a reply
  /// that is not a finite number.
  double evaluate(const Eigen::VectorXd& x);

  [[nodiscard]] const std::string& command() const { return command_; }

 private:
  void spawn();
  void shutdown();
  std::string read_line();

  std::string command_;
  double timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

/// Objective backed by its own ExternalProcess.
Objective make_external_objective(const std::string& command,
                                  double timeout_seconds = kDefaultObjectiveTimeout);

}  // namespace hei
