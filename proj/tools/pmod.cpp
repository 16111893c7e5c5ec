#include <glog/logging.h>

#include "pmod/cli.hpp"

int main(int argc, char** argv) {
  // The line-search warnings of the smoothed minimizer are noise here.
  FLAGS_minloglevel = google::GLOG_ERROR;
  FLAGS_logtostderr = true;
  return pmod::cli::run(argc, argv);
}
