#include <pybind11/pybind11.h>
PYBIND11_MODULE(fpimpulse, m) { m.doc() = "stub"; }
