from .local_directory import LocalDirectory, create_storage_interface, get_output_dir
