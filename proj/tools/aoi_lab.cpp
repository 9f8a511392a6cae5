#include "aoilab/harness.hpp"

int main(int argc, char** argv) { return aoilab::harness::run(argc, argv); }
