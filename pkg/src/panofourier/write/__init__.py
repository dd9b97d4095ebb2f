from .write_files import TrainingLog, read_ply, read_training_log, write_pgm, write_ply, write_products
