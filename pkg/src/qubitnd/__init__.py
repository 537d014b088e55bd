"""Information-theoretic noise and disturbance of qubit measurements."""
