from . import bench
bench.command_line()
