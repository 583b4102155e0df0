# Backend tests package
